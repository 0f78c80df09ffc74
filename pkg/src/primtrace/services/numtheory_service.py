"""
Number Theory Service
Integer factorization, multiplicative functions and the bound constants used
by every existence inequality.
"""

import logging
import math
import random
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.exceptions import DomainError, InputValidationError, InvariantViolation, ResourceLimitError
from ..core.models import C_CEILING_8, C_CEILING_EVEN_4, C_CEILING_ODD_4, Factorization

logger = logging.getLogger(__name__)

# Miller-Rabin with these bases is exact below this bound
_WITNESS_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DETERMINISTIC_LIMIT = 3317044064679887385961981
_PROBABILISTIC_ROUNDS = 64

LOGLOG_FACTOR = 0.96


def _require_positive(t: int, name: str = "t") -> None:
    if not isinstance(t, (int, np.integer)) or isinstance(t, bool) or t < 1:
        raise InputValidationError(f"{name} must be a positive integer, got {t!r}")


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> Tuple[int, ...]:
    """All primes <= limit (sieve of Eratosthenes)"""
    if limit < 2:
        return ()
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return tuple(int(x) for x in np.flatnonzero(sieve))


def _miller_rabin_round(n: int, base: int, d: int, r: int) -> bool:
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """
    Miller-Rabin primality test.

    Deterministic below 3.3e24; above that, 64 rounds with bases drawn from a
    generator seeded by ``n`` so the answer is reproducible.
    """
    if n < 2:
        return False
    for p in _WITNESS_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < _DETERMINISTIC_LIMIT:
        bases = _WITNESS_BASES
    else:
        rng = random.Random(n)
        bases = tuple(rng.randrange(2, n - 1) for _ in range(_PROBABILISTIC_ROUNDS))
    return all(_miller_rabin_round(n, base, d, r) for base in bases)


def integer_root(x: int, k: int) -> int:
    """Largest r with r**k <= x"""
    if x < 2 or k == 1:
        return x
    lo, hi = 1, 1 << (x.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** k <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _perfect_power(n: int) -> Optional[Tuple[int, int]]:
    for k in range(2, n.bit_length() + 1):
        root = integer_root(n, k)
        if root < 2:
            break
        if root ** k == n:
            return root, k
    return None


def pollard_rho_brent(n: int, budget: int) -> Optional[int]:
    """
    Brent's variant of Pollard's rho. Returns a nontrivial factor of the odd
    composite ``n`` or None once ``budget`` iterations are spent.

    The pseudo-random parameters come from a generator seeded by ``n``.
    """
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    iterations = 0
    while iterations < budget:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            iterations += r
            k = 0
            while k < r and g == 1:
                ys = y
                steps = min(m, r - k)
                for _ in range(steps):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                iterations += steps
                g = math.gcd(q, n)
                k += m
            r *= 2
            if iterations >= budget and g == 1:
                return None
        if g == n:
            # backtrack one step at a time from the last saved point
            for _ in range(r):
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                if g > 1:
                    break
        if 1 < g < n:
            return g
        logger.debug(f"rho cycle closed without a factor of {n}, restarting")
    return None


@lru_cache(maxsize=4096)
def factorize_partial(t: int, budget: Optional[int] = None, trial_bound: Optional[int] = None) -> Factorization:
    """
    Factor ``t`` as far as the effort budget allows.

    Never raises on budget exhaustion: the unsplit part is returned as
    ``cofactor`` (coprime to every listed prime, all of its prime factors
    above ``prime_floor``) with ``complete`` set to False.
    """
    _require_positive(t)
    budget = settings.RHO_BUDGET if budget is None else budget
    trial_bound = settings.TRIAL_DIVISION_BOUND if trial_bound is None else trial_bound

    factors: Dict[int, int] = {}
    remaining = t
    exhausted_trial = True
    for p in primes_up_to(trial_bound):
        if p * p > remaining:
            exhausted_trial = False
            break
        if remaining % p == 0:
            exponent = 0
            while remaining % p == 0:
                remaining //= p
                exponent += 1
            factors[p] = exponent

    unfactored = 1
    if remaining > 1:
        if not exhausted_trial or remaining <= trial_bound * trial_bound:
            factors[remaining] = factors.get(remaining, 0) + 1
        else:
            stack = [remaining]
            while stack:
                m = stack.pop()
                if m == 1:
                    continue
                if is_probable_prime(m):
                    factors[m] = factors.get(m, 0) + 1
                    continue
                power = _perfect_power(m)
                if power is not None:
                    stack.extend([power[0]] * power[1])
                    continue
                divisor = pollard_rho_brent(m, budget)
                if divisor is None:
                    logger.warning(f"rho budget of {budget} iterations exhausted on a {m.bit_length()}-bit cofactor of {t}")
                    unfactored *= m
                    continue
                stack.extend([divisor, m // divisor])

    # keep the cofactor coprime to the listed primes
    for p in list(factors):
        while unfactored > 1 and unfactored % p == 0:
            unfactored //= p
            factors[p] += 1

    ordered = tuple(sorted(factors.items()))
    result = Factorization(
        value=t,
        factors=ordered,
        complete=unfactored == 1,
        cofactor=unfactored,
        prime_floor=trial_bound + 1,
    )
    if result.product() != t:
        raise InvariantViolation(f"factor product does not reconstruct {t}")
    return result


def factorize(t: int, budget: Optional[int] = None) -> Factorization:
    """Complete factorization of ``t``; ResourceLimitError if the budget runs out"""
    result = factorize_partial(t, budget)
    if not result.complete:
        raise ResourceLimitError(
            f"could not split a composite cofactor of {t} within the rho budget",
            limit=settings.RHO_BUDGET if budget is None else budget,
        )
    return result


def merge_factorizations(value: int, parts: List[Factorization]) -> Factorization:
    """Combine factorizations of coprime-or-not pieces whose product is ``value``"""
    factors: Dict[int, int] = {}
    cofactor = 1
    prime_floor = None
    for part in parts:
        for prime, exponent in part.factors:
            factors[prime] = factors.get(prime, 0) + exponent
        cofactor *= part.cofactor
        if not part.complete:
            prime_floor = part.prime_floor if prime_floor is None else min(prime_floor, part.prime_floor)
    for p in list(factors):
        while cofactor > 1 and cofactor % p == 0:
            cofactor //= p
            factors[p] += 1
    result = Factorization(
        value=value,
        factors=tuple(sorted(factors.items())),
        complete=cofactor == 1,
        cofactor=cofactor,
        prime_floor=prime_floor or 2,
    )
    if result.product() != value:
        raise InvariantViolation(f"merged factors do not reconstruct {value}")
    return result


def cyclotomic_value(e: int, q: int) -> int:
    """Phi_e(q) via the Moebius product over the divisors of e"""
    numerator, denominator = 1, 1
    for d in divisors(e):
        mu = mobius(e // d)
        if mu == 1:
            numerator *= q ** d - 1
        elif mu == -1:
            denominator *= q ** d - 1
    return numerator // denominator


@lru_cache(maxsize=1024)
def factorize_power_minus_one_partial(q: int, n: int, budget: Optional[int] = None) -> Factorization:
    """Factor q^n - 1 piecewise along its cyclotomic split, as far as the budget allows"""
    if q < 2:
        raise InputValidationError(f"q must be at least 2, got {q}")
    _require_positive(n, "n")
    parts = [factorize_partial(cyclotomic_value(e, q), budget) for e in divisors(n)]
    return merge_factorizations(q ** n - 1, parts)


def factorize_power_minus_one(q: int, n: int, budget: Optional[int] = None) -> Factorization:
    result = factorize_power_minus_one_partial(q, n, budget)
    if not result.complete:
        raise ResourceLimitError(
            f"could not completely factor {q}^{n}-1 within the rho budget",
            limit=settings.RHO_BUDGET if budget is None else budget,
        )
    return result


def squarefree_divisor_count(f: Factorization) -> int:
    """W(t) = 2^omega(t)"""
    if not f.complete:
        raise InputValidationError(f"squarefree divisor count needs a complete factorization of {f.value}")
    return 2 ** f.omega


def w_bounds(f: Factorization) -> Tuple[int, int]:
    """
    Exact lower and upper bounds on W(t) from a possibly incomplete factorization.
    """
    if f.complete:
        w = 2 ** f.omega
        return w, w
    cofactor = f.cofactor
    # an unsplit cofactor is composite and not a prime power, so it adds >= 2 primes
    power = _perfect_power(cofactor)
    low_extra = 1 if power is not None else 2
    high_extra = 0
    product = 1
    while product * f.prime_floor <= cofactor:
        product *= f.prime_floor
        high_extra += 1
    return 2 ** (f.omega + low_extra), 2 ** (f.omega + max(high_extra, low_extra))


def mobius(t: int) -> int:
    _require_positive(t)
    f = factorize(t)
    if any(exponent > 1 for _, exponent in f.factors):
        return 0
    return -1 if f.omega % 2 else 1


def euler_phi(t: int) -> int:
    _require_positive(t)
    result = 1
    for prime, exponent in factorize(t).factors:
        result *= prime ** (exponent - 1) * (prime - 1)
    return result


def sigma0(t: int) -> int:
    _require_positive(t)
    return math.prod(exponent + 1 for _, exponent in factorize(t).factors)


@lru_cache(maxsize=4096)
def _divisors(t: int) -> Tuple[int, ...]:
    result = [1]
    for prime, exponent in factorize(t).factors:
        result = [d * prime ** i for d in result for i in range(exponent + 1)]
    return tuple(sorted(result))


def divisors(t: int) -> List[int]:
    _require_positive(t)
    return list(_divisors(t))


def omega_sieve(limit: int) -> np.ndarray:
    """omega(t) for 0 <= t <= limit (index 0 and 1 hold 0)"""
    omega = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit):
        omega[p::p] += 1
    return omega


def mobius_sieve(limit: int) -> np.ndarray:
    """mu(t) for 0 <= t <= limit (index 0 holds 0)"""
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(limit):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def primes_dividing_power_minus_one_below(q: int, n: int, bound: int) -> List[int]:
    """Primes p <= bound with q^n = 1 (mod p), by modular exponentiation only"""
    if bound < 2:
        raise InputValidationError(f"bound must be at least 2, got {bound}")
    return [p for p in primes_up_to(bound) if pow(q, n, p) == 1]


def c_ceiling(q: int, a: int) -> Optional[float]:
    """Published ceiling for c_{q^n-1,a}; q odd means q^n-1 is even"""
    if a == 4:
        return C_CEILING_EVEN_4 if q % 2 == 1 else C_CEILING_ODD_4
    if a == 8:
        return C_CEILING_8
    return None


def c_constant(q: int, n: int, a: int) -> float:
    """
    c_{t,a} = 2^j / (p_1 ... p_j)^(1/a) for t = q^n - 1, where p_1..p_j are the
    primes <= 2^a dividing t.
    """
    if a < 1:
        raise InputValidationError(f"a must be positive, got {a}")
    primes = primes_dividing_power_minus_one_below(q, n, 2 ** a)
    log_c = len(primes) * math.log(2) - sum(math.log(p) for p in primes) / a
    c = math.exp(log_c)
    ceiling = c_ceiling(q, a)
    if ceiling is not None and not c < ceiling:
        raise InvariantViolation(f"c_constant({q}, {n}, {a}) = {c} exceeds its ceiling {ceiling}")
    return c


def log_w_bound_loglog(t: int) -> float:
    """Natural log of t^(0.96 / log log t)"""
    if t < 3:
        raise DomainError(f"the log-log bound needs t >= 3, got {t}")
    log_t = math.log(t)
    loglog_t = math.log(log_t)
    if loglog_t <= 0:
        raise DomainError(f"log log {t} is not positive")
    return LOGLOG_FACTOR * log_t / loglog_t


def w_bound_loglog(t: int) -> float:
    """t^(0.96 / log log t), an upper bound for W(t - 1)"""
    exponent = log_w_bound_loglog(t)
    try:
        return math.exp(exponent)
    except OverflowError:
        raise DomainError(f"t^(0.96/log log t) overflows a double for t={t}; use log_w_bound_loglog")


def loglog_bound_sweep(limit: int, slack: Optional[float] = None) -> Dict[str, object]:
    """
    Check W(t - 1) < t^(0.96 / log log t) for every 3 <= t <= limit.

    A case only counts as holding if it holds after shrinking the bound by the
    relative slack.
    """
    slack = settings.FLOAT_SLACK if slack is None else slack
    if limit < 3:
        raise InputValidationError(f"limit must be at least 3, got {limit}")
    omega = omega_sieve(limit)
    t = np.arange(3, limit + 1, dtype=np.float64)
    log_t = np.log(t)
    log_bound = LOGLOG_FACTOR * log_t / np.log(log_t)
    log_w = omega[2:limit].astype(np.float64) * math.log(2)
    margin = log_bound + math.log1p(-slack) - log_w
    violations = (np.flatnonzero(margin <= 0) + 3).tolist()
    logger.info(f"log-log bound sweep up to {limit}: {len(violations)} violations")
    return {
        "checked": int(t.size),
        "violations": violations,
        "min_log_margin": float(margin.min()),
        "argmin": int(np.argmin(margin)) + 3,
    }
