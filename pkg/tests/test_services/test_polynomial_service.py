import pytest
import sympy

from src.primtrace.core.exceptions import DomainError
from src.primtrace.services.polynomial_service import (
    coefficients_from_index,
    is_irreducible,
    poly_divmod,
    poly_gcd,
    poly_mul,
    poly_powmod,
    poly_strip,
    smallest_irreducible,
)


def test_strip_and_zero_polynomial():
    assert poly_strip([1, 0, 0]) == [1]
    assert poly_strip([0, 0]) == []


def test_divmod_reconstructs():
    f = [1, 2, 0, 1, 2]
    g = [2, 1, 1]
    quotient, remainder = poly_divmod(f, g, 3)
    assert len(remainder) < len(g)
    rebuilt = [0] * len(f)
    for i, c in enumerate(poly_mul(quotient, g, 3)):
        rebuilt[i] += c
    for i, c in enumerate(remainder):
        rebuilt[i] += c
    assert poly_strip([c % 3 for c in rebuilt]) == poly_strip(f)


def test_division_by_zero():
    with pytest.raises(DomainError):
        poly_divmod([1, 1], [], 2)


def test_gcd_is_monic():
    # (x + 1)^2 and (x + 1)(x + 2) over GF(3)
    assert poly_gcd(poly_mul([1, 1], [1, 1], 3), poly_mul([1, 1], [2, 1], 3), 3) == [1, 1]


def test_powmod_fermat():
    # x^(2^3) = x modulo an irreducible cubic over GF(2)
    assert poly_powmod([0, 1], 8, [1, 1, 0, 1], 2) == [0, 1]


def test_irreducibility_examples():
    assert is_irreducible([1, 1, 0, 1], 2)
    assert is_irreducible([1, 1, 0, 0, 1], 2)
    assert not is_irreducible([1, 0, 1, 0, 1], 2)
    assert is_irreducible([1, 0, 1], 3)
    assert not is_irreducible([2, 0, 1], 3)


def test_irreducibility_matches_sympy():
    x = sympy.symbols("x")
    for p in (2, 3):
        for index in range(p ** 4):
            coeffs = coefficients_from_index(index, p, 4) + [1]
            poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
            assert is_irreducible(coeffs, p) == poly.is_irreducible, coeffs


def test_smallest_irreducible():
    assert smallest_irreducible(2, 1) == [0, 1]
    assert smallest_irreducible(2, 2) == [1, 1, 1]
    assert smallest_irreducible(2, 3) == [1, 1, 0, 1]
    assert smallest_irreducible(3, 2) == [1, 0, 1]
    with pytest.raises(DomainError):
        smallest_irreducible(2, 0)
