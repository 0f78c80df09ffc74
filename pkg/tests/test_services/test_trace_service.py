import pytest

from src.primtrace.core.exceptions import (
    DivisibleEntriesError,
    InputValidationError,
    NonDivisorError,
    SubfieldMembershipError,
    TupleSizeError,
)
from src.primtrace.services.field_service import get_context
from src.primtrace.services.numtheory_service import euler_phi
from src.primtrace.services.trace_service import (
    admissible_targets,
    all_divisor_tuples,
    count_with_traces,
    enumerate_with_traces,
    fiber_histogram,
    lambda_inclusion_exclusion,
    lambda_lcm_degree,
    make_divisor_tuple,
    make_trace_spec,
    reference_element,
    zero_sum_tuple_count,
)


def _nonzero_trace_target(ctx, d):
    """An element of GF(q^d) whose trace down to GF(q) is nonzero"""
    for encoding in ctx.subfield_encodings(d).tolist():
        if not ctx.relative_trace(encoding, d, 1).is_zero:
            return encoding
    raise AssertionError("trace to the prime field is surjective")


def test_divisor_tuple_derived_quantities():
    t = make_divisor_tuple(12, [4, 3])
    assert t.entries == (3, 4)
    assert (t.k, t.D, t.lambda_d, t.lcm_value) == (2, 7, 6, 12)
    assert make_divisor_tuple(30, [2, 3, 5]).lambda_d == 8
    wide = make_divisor_tuple(60, [4, 6, 10])
    assert (wide.lambda_d, wide.lcm_value) == (16, 60)


def test_lambda_formulas_agree_on_examples():
    assert lambda_inclusion_exclusion([4, 6, 10]) == lambda_lcm_degree([4, 6, 10]) == 16
    assert lambda_inclusion_exclusion([2, 3, 7]) == 10


def test_divisor_tuple_rejections():
    with pytest.raises(NonDivisorError):
        make_divisor_tuple(12, [5, 3])
    with pytest.raises(NonDivisorError):
        make_divisor_tuple(12, [3, 12])
    with pytest.raises(DivisibleEntriesError):
        make_divisor_tuple(12, [2, 4])
    with pytest.raises(TupleSizeError):
        make_divisor_tuple(12, [3])
    with pytest.raises(InputValidationError):
        make_divisor_tuple(12, ["3", 4])
    assert make_divisor_tuple(12, [3], allow_k1=True).lambda_d == 3


def test_all_divisor_tuples_of_12():
    assert [t.entries for t in all_divisor_tuples(12)] == [(2, 3), (3, 4), (4, 6)]


def test_prime_power_degree_has_no_tuples():
    assert list(all_divisor_tuples(4)) == []
    assert list(all_divisor_tuples(27)) == []


def test_lambda_bound_sweep():
    for n in range(2, 61):
        for t in all_divisor_tuples(n):
            assert t.lambda_d <= n - euler_phi(n)


@pytest.mark.slow
def test_lambda_bound_sweep_to_200():
    for n in range(2, 201):
        for t in all_divisor_tuples(n):
            assert t.lambda_d <= n - euler_phi(n)


def test_trace_spec_validation(gf64):
    tuple_23 = make_divisor_tuple(6, [2, 3])
    with pytest.raises(InputValidationError):
        make_trace_spec(gf64, tuple_23, [0])
    outside = next(e for e in range(gf64.size) if e not in set(gf64.subfield_encodings(3).tolist()))
    with pytest.raises(SubfieldMembershipError) as excinfo:
        make_trace_spec(gf64, tuple_23, [0, outside])
    assert excinfo.value.index == 1
    with pytest.raises(InputValidationError):
        make_trace_spec(gf64, make_divisor_tuple(12, [3, 4]), [0, 0])


def test_fiber_count_matches_prediction(gf64):
    tuple_23 = make_divisor_tuple(6, [2, 3])
    spec = make_trace_spec(gf64, tuple_23, [0, 0])
    assert spec.admissible
    assert count_with_traces(gf64, spec) == 4
    for x in enumerate_with_traces(gf64, spec):
        assert gf64.trace(x, 2).is_zero and gf64.trace(x, 3).is_zero


def test_non_admissible_targets_have_empty_fiber(gf64):
    tuple_23 = make_divisor_tuple(6, [2, 3])
    spec = make_trace_spec(gf64, tuple_23, [_nonzero_trace_target(gf64, 2), 0])
    assert not spec.admissible
    assert count_with_traces(gf64, spec) == 0
    assert reference_element(gf64, spec) is None


def test_reference_element_carries_targets(gf729):
    tuple_23 = make_divisor_tuple(6, [2, 3])
    a2 = _nonzero_trace_target(gf729, 2)
    a3 = next(
        e for e in gf729.subfield_encodings(3).tolist()
        if gf729.relative_trace(e, 3, 1) == gf729.relative_trace(a2, 2, 1)
    )
    spec = make_trace_spec(gf729, tuple_23, [a2, a3])
    assert spec.admissible
    beta = reference_element(gf729, spec)
    assert gf729.encode(gf729.trace(beta, 2)) == a2
    assert gf729.encode(gf729.trace(beta, 3)) == a3


@pytest.mark.parametrize("fixture_name,q", [("gf64", 2), ("gf729", 3), ("gf4096_over_4", 4)])
def test_fiber_histogram_is_uniform_over_admissible_targets(request, fixture_name, q):
    ctx = request.getfixturevalue(fixture_name)
    tuple_23 = make_divisor_tuple(6, [2, 3])
    histogram = fiber_histogram(ctx, tuple_23)
    admissible = list(admissible_targets(ctx, tuple_23))
    assert sorted(histogram) == sorted(admissible)
    assert set(histogram.values()) == {q ** (6 - tuple_23.lambda_d)}
    assert len(admissible) == q ** tuple_23.lambda_d


@pytest.mark.parametrize("fixture_name,q", [("gf64", 2), ("gf729", 3), ("gf4096_over_4", 4)])
def test_zero_sum_count(request, fixture_name, q):
    ctx = request.getfixturevalue(fixture_name)
    tuple_23 = make_divisor_tuple(6, [2, 3])
    assert zero_sum_tuple_count(ctx, tuple_23) == q ** (tuple_23.D - tuple_23.lambda_d)


def test_zero_sum_count_for_2_3_5():
    tuple_235 = make_divisor_tuple(30, [2, 3, 5])
    assert tuple_235.lambda_d == 8
    assert zero_sum_tuple_count(get_context(2, 30), tuple_235) == 4


def _desk_contexts(limit):
    for q in (2, 3, 4, 5, 7, 8, 9):
        n = 2
        while q ** n <= limit:
            yield get_context(q, n)
            n += 1


def _check_fiber_and_zero_sum_laws(ctx):
    q, n = ctx.q, ctx.n
    for divisor_tuple in all_divisor_tuples(n):
        histogram = fiber_histogram(ctx, divisor_tuple)
        # targets outside the admissible set never occur
        assert sorted(histogram) == sorted(admissible_targets(ctx, divisor_tuple)), (q, n, divisor_tuple.entries)
        assert set(histogram.values()) == {q ** (n - divisor_tuple.lambda_d)}, (q, n, divisor_tuple.entries)
        assert zero_sum_tuple_count(ctx, divisor_tuple) == q ** (divisor_tuple.D - divisor_tuple.lambda_d)


@pytest.mark.parametrize("q,n", [(2, 10), (2, 12), (3, 6), (4, 6), (2, 15)])
def test_fiber_and_zero_sum_laws_for_every_tuple(q, n):
    _check_fiber_and_zero_sum_laws(get_context(q, n))


@pytest.mark.slow
def test_fiber_and_zero_sum_laws_up_to_2_16():
    for ctx in _desk_contexts(2 ** 16):
        _check_fiber_and_zero_sum_laws(ctx)
