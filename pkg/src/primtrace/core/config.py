import os
from dotenv import load_dotenv

load_dotenv()

class Settings:
    """Application settings and configuration"""

    # Exhaustive sweep ceilings (field sizes p^m / q^D)
    ENUMERATION_CEILING: int = int(os.getenv("PRIMTRACE_ENUMERATION_CEILING", str(2 ** 22)))
    TABLE_CEILING: int = int(os.getenv("PRIMTRACE_TABLE_CEILING", str(2 ** 22)))
    ZERO_SUM_CEILING: int = int(os.getenv("PRIMTRACE_ZERO_SUM_CEILING", str(2 ** 22)))
    CHARSUM_CEILING: int = int(os.getenv("PRIMTRACE_CHARSUM_CEILING", str(2 ** 12)))
    CONTEXT_CEILING: int = int(os.getenv("PRIMTRACE_CONTEXT_CEILING", str(2 ** 64)))

    # Factorization effort
    TRIAL_DIVISION_BOUND: int = int(os.getenv("PRIMTRACE_TRIAL_DIVISION_BOUND", str(10 ** 6)))
    RHO_BUDGET: int = int(os.getenv("PRIMTRACE_RHO_BUDGET", str(2 ** 26)))
    SWEEP_RHO_BUDGET: int = int(os.getenv("PRIMTRACE_SWEEP_RHO_BUDGET", str(2 ** 16)))

    # Relative slack for real-valued bound comparisons
    FLOAT_SLACK: float = float(os.getenv("PRIMTRACE_FLOAT_SLACK", "1e-9"))

    # Application Settings
    APP_NAME: str = "primtrace"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = os.getenv("PRIMTRACE_LOG_LEVEL", "INFO")
    DEBUG: bool = os.getenv("PRIMTRACE_DEBUG", "False").lower() == "true"

settings = Settings()
