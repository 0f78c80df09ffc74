"""
Dense polynomials over GF(p).

A polynomial is a list of residues with the constant term first; the zero
polynomial is the empty list.
"""

import logging
from typing import List, Sequence, Tuple

from ..core.exceptions import DomainError
from .numtheory_service import factorize

logger = logging.getLogger(__name__)

Poly = List[int]


def poly_strip(f: Sequence[int]) -> Poly:
    """Drop vanishing leading coefficients"""
    result = list(f)
    while result and result[-1] == 0:
        result.pop()
    return result


def poly_degree(f: Sequence[int]) -> int:
    return len(poly_strip(f)) - 1


def poly_add(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    size = max(len(f), len(g))
    result = [0] * size
    for i, c in enumerate(f):
        result[i] = c
    for i, c in enumerate(g):
        result[i] = (result[i] + c) % p
    return poly_strip(result)


def poly_sub(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    return poly_add(f, [(-c) % p for c in g], p)


def poly_mul(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    if not f or not g:
        return []
    result = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            result[i + j] += a * b
    return poly_strip([c % p for c in result])


def poly_divmod(f: Sequence[int], g: Sequence[int], p: int) -> Tuple[Poly, Poly]:
    """Quotient and remainder of f by g over GF(p)"""
    g = poly_strip(g)
    if not g:
        raise DomainError("polynomial division by zero")
    remainder = poly_strip(f)
    dg = len(g) - 1
    if len(remainder) - 1 < dg:
        return [], remainder
    lead_inv = pow(g[-1], -1, p)
    quotient = [0] * (len(remainder) - dg)
    for shift in range(len(remainder) - 1 - dg, -1, -1):
        coeff = remainder[shift + dg] * lead_inv % p
        quotient[shift] = coeff
        if coeff:
            for i, b in enumerate(g):
                remainder[shift + i] = (remainder[shift + i] - coeff * b) % p
    return poly_strip(quotient), poly_strip(remainder[:dg])


def poly_rem(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    return poly_divmod(f, g, p)[1]


def poly_mulmod(f: Sequence[int], g: Sequence[int], modulus: Sequence[int], p: int) -> Poly:
    return poly_rem(poly_mul(f, g, p), modulus, p)


def poly_powmod(f: Sequence[int], e: int, modulus: Sequence[int], p: int) -> Poly:
    """f^e mod modulus by square-and-multiply"""
    if e < 0:
        raise DomainError("negative exponent for a polynomial power")
    result: Poly = poly_rem([1], modulus, p)
    base = poly_rem(f, modulus, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, modulus, p)
        e >>= 1
        if e:
            base = poly_mulmod(base, base, modulus, p)
    return result


def poly_monic(f: Sequence[int], p: int) -> Poly:
    f = poly_strip(f)
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def poly_gcd(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    """Monic gcd over GF(p)"""
    a, b = poly_strip(f), poly_strip(g)
    while b:
        a, b = b, poly_rem(a, b, p)
    return poly_monic(a, p)


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """
    Rabin's irreducibility test: f of degree m is irreducible iff
    x^(p^m) = x mod f and gcd(x^(p^(m/r)) - x, f) = 1 for every prime r | m.
    """
    f = poly_monic(f, p)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    for r in factorize(m).primes:
        h = poly_powmod(x, p ** (m // r), f, p)
        if poly_gcd(poly_sub(h, x, p), f, p) != [1]:
            return False
    return poly_powmod(x, p ** m, f, p) == poly_rem(x, f, p)


def coefficients_from_index(index: int, p: int, length: int) -> List[int]:
    """Base-p digits of ``index``, least significant first"""
    digits = []
    for _ in range(length):
        index, r = divmod(index, p)
        digits.append(r)
    return digits


def smallest_irreducible(p: int, m: int) -> Poly:
    """
    The monic irreducible polynomial of degree m whose lower coefficients,
    read as a base-p integer with the constant term least significant, are
    smallest.
    """
    if m < 1:
        raise DomainError(f"degree must be positive, got {m}")
    index = 0
    while index < p ** m:
        candidate = coefficients_from_index(index, p, m) + [1]
        if is_irreducible(candidate, p):
            logger.debug(f"defining polynomial for GF({p}^{m}): {candidate}")
            return candidate
        index += 1
    raise DomainError(f"no irreducible polynomial of degree {m} over GF({p})")
