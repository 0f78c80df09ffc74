import pytest

# Import from our package structure
from src.primtrace.core.config import Settings, settings
from src.primtrace.services.field_service import get_context
from src.primtrace.services.charsum_service import get_character_table


# Test settings that override main settings
class TestSettings(Settings):
    """Test-specific settings"""
    ENUMERATION_CEILING: int = 2 ** 16
    TABLE_CEILING: int = 2 ** 16
    SWEEP_RHO_BUDGET: int = 2 ** 14
    DEBUG: bool = True


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive sweeps at full desk scale")


@pytest.fixture
def test_settings(monkeypatch):
    """Apply the test overrides to the shared settings object"""
    overrides = TestSettings()
    for name in ("ENUMERATION_CEILING", "TABLE_CEILING", "SWEEP_RHO_BUDGET", "DEBUG"):
        monkeypatch.setattr(settings, name, getattr(overrides, name))
    return overrides


@pytest.fixture(scope="session")
def gf8():
    """GF(2^3) over GF(2)"""
    return get_context(2, 3)


@pytest.fixture(scope="session")
def gf9():
    """GF(3^2) over GF(3)"""
    return get_context(3, 2)


@pytest.fixture(scope="session")
def gf64():
    """GF(2^6) over GF(2)"""
    return get_context(2, 6)


@pytest.fixture(scope="session")
def gf729():
    """GF(3^6) over GF(3)"""
    return get_context(3, 6)


@pytest.fixture(scope="session")
def gf4096_over_4():
    """GF(4^6) over GF(4)"""
    return get_context(4, 6)


@pytest.fixture(scope="session")
def table64(gf64):
    return get_character_table(gf64)


@pytest.fixture(scope="session")
def table729(gf729):
    return get_character_table(gf729)
