import numpy as np
import pytest
import sympy

from src.primtrace.core.exceptions import DomainError, InputValidationError, InvariantViolation, ResourceLimitError
from src.primtrace.core.models import Factorization
from src.primtrace.services.numtheory_service import (
    C_CEILING_8,
    c_ceiling,
    c_constant,
    cyclotomic_value,
    divisors,
    euler_phi,
    factorize,
    factorize_partial,
    factorize_power_minus_one,
    integer_root,
    is_probable_prime,
    loglog_bound_sweep,
    log_w_bound_loglog,
    mobius,
    mobius_sieve,
    omega_sieve,
    pollard_rho_brent,
    primes_dividing_power_minus_one_below,
    primes_up_to,
    sigma0,
    squarefree_divisor_count,
    w_bound_loglog,
    w_bounds,
)

MERSENNE_67 = 2 ** 67 - 1  # 193707721 * 761838257287


def test_primes_up_to_matches_sympy():
    assert list(primes_up_to(1000)) == list(sympy.primerange(2, 1001))
    assert primes_up_to(1) == ()


def test_is_probable_prime_small_range():
    for n in range(-3, 3000):
        assert is_probable_prime(n) == sympy.isprime(n), n


def test_is_probable_prime_large_values():
    assert is_probable_prime(2 ** 61 - 1)
    assert is_probable_prime(2 ** 127 - 1)
    assert not is_probable_prime(MERSENNE_67)
    # strong pseudoprime to every prime base up to 31
    assert not is_probable_prime(3825123056546413051)


def test_integer_root():
    assert integer_root(10 ** 12, 3) == 10 ** 4
    assert integer_root(10 ** 12 - 1, 3) == 10 ** 4 - 1
    assert integer_root(2 ** 100, 10) == 1024


def test_pollard_rho_brent_splits_m67():
    divisor = pollard_rho_brent(MERSENNE_67, 2 ** 22)
    assert divisor in (193707721, 761838257287)


def test_factorize_matches_sympy():
    for t in [1, 2, 12, 360, 9699690, 2 ** 30 - 1, 3 ** 20 - 1, 10 ** 12 + 39, MERSENNE_67]:
        f = factorize(t)
        assert f.complete
        assert dict(f.factors) == sympy.factorint(t)
        assert f.product() == t


def test_factorize_rejects_non_positive():
    with pytest.raises(InputValidationError):
        factorize(0)


def test_factorize_budget_exhaustion():
    # no prime factor below the trial bound and no rho effort at all
    t = 1000003 * 1000033
    partial = factorize_partial(t, budget=0, trial_bound=100)
    assert not partial.complete
    assert partial.cofactor == t
    assert partial.prime_floor == 101
    with pytest.raises(ResourceLimitError):
        factorize(MERSENNE_67, budget=0)


def test_factorize_power_minus_one_uses_cyclotomic_split():
    f = factorize_power_minus_one(2, 12)
    assert dict(f.factors) == {3: 2, 5: 1, 7: 1, 13: 1}
    g = factorize_power_minus_one(13, 30)
    assert dict(g.factors) == sympy.factorint(13 ** 30 - 1)


def test_cyclotomic_value():
    assert cyclotomic_value(1, 2) == 1
    assert cyclotomic_value(6, 2) == 3
    assert cyclotomic_value(12, 3) == 73
    product = 1
    for e in divisors(30):
        product *= cyclotomic_value(e, 5)
    assert product == 5 ** 30 - 1


def test_squarefree_divisor_count_examples():
    assert squarefree_divisor_count(factorize_power_minus_one(2, 30)) == 64
    assert squarefree_divisor_count(factorize_power_minus_one(2, 36)) == 256
    assert squarefree_divisor_count(factorize(1)) == 1


def test_squarefree_divisor_count_needs_complete_factorization():
    partial = factorize_partial(1000003 * 1000033, budget=0, trial_bound=100)
    with pytest.raises(InputValidationError):
        squarefree_divisor_count(partial)


def test_w_bounds_from_partial_factorization():
    cofactor = 1000003 * 1000033
    f = Factorization(value=3 * cofactor, factors=((3, 1),), complete=False, cofactor=cofactor, prime_floor=101)
    assert w_bounds(f) == (8, 64)
    square = Factorization(value=3 * 1000003 ** 2, factors=((3, 1),), complete=False, cofactor=1000003 ** 2, prime_floor=101)
    assert w_bounds(square) == (4, 64)
    exact = factorize(360)
    assert w_bounds(exact) == (8, 8)


def test_multiplicative_functions_match_sympy():
    for t in range(1, 500):
        assert mobius(t) == sympy.mobius(t)
        assert euler_phi(t) == sympy.totient(t)
        assert sigma0(t) == sympy.divisor_count(t)
        assert divisors(t) == sympy.divisors(t)


def test_sieves_match_pointwise_functions():
    omega = omega_sieve(300)
    mu = mobius_sieve(300)
    for t in range(1, 301):
        assert omega[t] == len(sympy.primefactors(t))
        assert mu[t] == sympy.mobius(t)


def test_primes_dividing_power_minus_one_below():
    assert primes_dividing_power_minus_one_below(2, 6, 100) == [3, 7]
    assert primes_dividing_power_minus_one_below(3, 4, 16) == [2, 5]
    with pytest.raises(InputValidationError):
        primes_dividing_power_minus_one_below(2, 6, 1)


def test_c_constant_matches_definition():
    # 2^6 - 1 = 63: primes 3 and 7 below 2^4
    assert c_constant(2, 6, 4) == pytest.approx(4 / 21 ** 0.25)
    assert c_constant(37, 56, 8) < C_CEILING_8
    assert c_ceiling(3, 4) == 4.9
    assert c_ceiling(2, 4) == 2.9
    assert c_ceiling(2, 5) is None


def test_c_constant_stays_below_ceiling_on_many_cases():
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13]:
        for n in range(2, 40):
            for a in (4, 8):
                try:
                    c_constant(q, n, a)
                except InvariantViolation:
                    pytest.fail(f"c_constant({q}, {n}, {a}) exceeded its ceiling")


def test_loglog_bound_domain():
    with pytest.raises(DomainError):
        log_w_bound_loglog(2)
    assert w_bound_loglog(30031) > 64
    with pytest.raises(DomainError):
        w_bound_loglog(10 ** 5000)


def test_loglog_bound_sweep_has_no_violations():
    result = loglog_bound_sweep(10 ** 5)
    assert result["checked"] == 10 ** 5 - 2
    assert result["violations"] == []
    assert result["min_log_margin"] > 0


@pytest.mark.slow
def test_loglog_bound_sweep_to_one_million():
    assert loglog_bound_sweep(10 ** 6)["violations"] == []


def _divisor_sums(values):
    """sum of values[d] over d | t, for every index t"""
    totals = np.zeros_like(values)
    for d in range(1, len(values)):
        totals[d::d] += values[d]
    return totals


def _check_phi_and_mu_divisor_sums(limit):
    phi = np.array([0] + [euler_phi(t) for t in range(1, limit + 1)], dtype=np.int64)
    mu = np.array([0] + [mobius(t) for t in range(1, limit + 1)], dtype=np.int64)
    t = np.arange(limit + 1)
    assert np.array_equal(_divisor_sums(phi)[1:], t[1:])
    mu_sums = _divisor_sums(mu)
    assert mu_sums[1] == 1
    assert not mu_sums[2:].any()


def _check_w_counts_squarefree_divisors(limit):
    squarefree = np.abs(mobius_sieve(limit))
    assert np.array_equal(_divisor_sums(squarefree)[1:], 2 ** omega_sieve(limit)[1:])


def test_phi_and_mu_divisor_sums():
    _check_phi_and_mu_divisor_sums(3000)


def test_w_counts_squarefree_divisors():
    for t in range(1, 3001):
        squarefree = sum(1 for d in divisors(t) if mobius(d) != 0)
        assert squarefree_divisor_count(factorize(t)) == squarefree
    _check_w_counts_squarefree_divisors(3000)


@pytest.mark.slow
def test_phi_and_mu_divisor_sums_to_1e5():
    _check_phi_and_mu_divisor_sums(10 ** 5)


@pytest.mark.slow
def test_w_counts_squarefree_divisors_to_1e6():
    _check_w_counts_squarefree_divisors(10 ** 6)
