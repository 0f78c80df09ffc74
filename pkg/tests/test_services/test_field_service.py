import itertools

import numpy as np
import pytest

from src.primtrace.core.exceptions import (
    DomainError,
    ElementEncodingError,
    NonDivisorError,
    NotPrimeError,
    NotPrimePowerError,
    ResourceLimitError,
)
from src.primtrace.services.field_service import FieldContext, build_context, get_context, split_prime_power
from src.primtrace.services.numtheory_service import euler_phi


def test_context_descriptor_and_defining_polynomial(gf8, gf9):
    assert gf8.defining_poly == (1, 1, 0, 1)
    assert gf8.descriptor() == "2,1,3;1,1,0,1"
    assert gf9.descriptor() == "3,1,2;1,0,1"
    assert gf8.order == 7


def test_split_prime_power():
    assert split_prime_power(9) == (3, 2)
    assert split_prime_power(7) == (7, 1)
    for bad in (1, 6, 12, 0):
        with pytest.raises(NotPrimePowerError):
            split_prime_power(bad)


def test_build_context_validation():
    with pytest.raises(NotPrimeError):
        build_context(4, 1, 2)
    with pytest.raises(NotPrimePowerError):
        get_context(6, 2)
    with pytest.raises(ResourceLimitError):
        build_context(2, 1, 65)


def test_encoding_round_trip(gf9):
    x = gf9.element([2, 1])
    assert gf9.encode(x) == 2 + 1 * 3
    assert gf9.decode(5) == x
    with pytest.raises(ElementEncodingError):
        gf9.element([3, 0])
    with pytest.raises(ElementEncodingError):
        gf9.decode(9)


def test_arithmetic_in_gf8(gf8):
    x = gf8.variable()
    assert gf8.encode(x) == 2
    # x^3 = x + 1
    assert gf8.encode(gf8.pow(x, 3)) == 3
    assert gf8.mul(x, gf8.inv(x)) == gf8.one()
    assert gf8.pow(x, 7) == gf8.one()
    assert gf8.pow(gf8.zero(), 0) == gf8.one()
    assert gf8.pow(gf8.zero(), 5) == gf8.zero()
    assert gf8.sub(x, x) == gf8.zero()
    assert gf8.add(x, gf8.neg(x)) == gf8.zero()


def test_zero_has_no_inverse(gf8):
    with pytest.raises(DomainError):
        gf8.inv(0)
    with pytest.raises(DomainError):
        gf8.pow(0, -1)


def test_field_axioms_gf9(gf9):
    elements = list(gf9.enumerate())
    for a, b, c in itertools.product(elements, repeat=3):
        assert gf9.mul(a, gf9.add(b, c)) == gf9.add(gf9.mul(a, b), gf9.mul(a, c))
    for a in elements:
        if not a.is_zero:
            assert gf9.mul(a, gf9.inv(a)) == gf9.one()


def test_frobenius_is_additive_and_periodic(gf4096_over_4):
    ctx = gf4096_over_4
    x, y = ctx.decode(1234), ctx.decode(3001)
    assert ctx.frobenius(ctx.add(x, y), 1) == ctx.add(ctx.frobenius(x, 1), ctx.frobenius(y, 1))
    assert ctx.frobenius(x, 1) == ctx.pow(x, 4)
    assert ctx.frobenius(x, 6) == x
    assert ctx.frobenius(x, 0) == x


def test_traces_in_gf8(gf8):
    x = gf8.variable()
    assert gf8.trace(x, 1) == gf8.zero()
    assert gf8.trace(gf8.one(), 1) == gf8.one()
    with pytest.raises(NonDivisorError):
        gf8.trace(x, 2)


def test_trace_transitivity(gf4096_over_4):
    ctx = gf4096_over_4
    for encoding in (5, 77, 2047, 4095):
        x = ctx.decode(encoding)
        assert ctx.relative_trace(ctx.trace(x, 2), 2, 1) == ctx.trace(x, 1)
        assert ctx.relative_trace(ctx.trace(x, 3), 3, 1) == ctx.trace(x, 1)


def test_trace_lands_in_subfield(gf64):
    for encoding in range(gf64.size):
        x = gf64.decode(encoding)
        for d in (1, 2, 3):
            assert gf64.in_subfield(gf64.trace(x, d), d)


def test_subfield_sizes_and_membership(gf64):
    for d in (1, 2, 3, 6):
        elements = gf64.subfield_encodings(d)
        assert len(elements) == 2 ** d
        assert elements[0] == 0 and 1 in elements
        assert all(gf64.in_subfield(int(e), d) for e in elements)


def test_trace_fibers_are_uniform(gf729):
    every = np.arange(gf729.size)
    for d in (1, 2, 3):
        _, counts = np.unique(gf729.trace_encodings(d, every), return_counts=True)
        assert len(counts) == 3 ** d
        assert set(counts.tolist()) == {3 ** (6 - d)}


def test_bulk_traces_match_single_element_traces(gf4096_over_4):
    ctx = gf4096_over_4
    sample = np.arange(0, ctx.size, 37)
    for d in (1, 2, 3):
        bulk = ctx.trace_encodings(d, sample)
        for encoding, value in zip(sample.tolist(), bulk.tolist()):
            assert ctx.encode(ctx.trace(encoding, d)) == value


def test_primitive_counts(gf8, gf9, gf64):
    for ctx in (gf8, gf9, gf64):
        count = sum(ctx.is_primitive(x) for x in ctx.enumerate())
        assert count == euler_phi(ctx.order)


def test_discrete_log_tables(gf64):
    g = gf64.generator
    assert gf64.is_primitive(g)
    for encoding in range(1, gf64.size):
        assert gf64.encode(gf64.pow(g, gf64.discrete_log(encoding))) == encoding
    assert gf64.log_table[0] == -1
    with pytest.raises(DomainError):
        gf64.discrete_log(0)


def test_multiplication_matrix_matches_mul(gf9):
    c = gf9.decode(7)
    every = np.arange(gf9.size)
    products = gf9.apply_matrix(gf9.multiplication_matrix(c), every)
    for encoding, value in zip(every.tolist(), products.tolist()):
        assert gf9.encode(gf9.mul(c, encoding)) == value


def test_enumeration_ceiling():
    ctx = FieldContext(2, 1, 10, table_ceiling=2 ** 4)
    assert ctx.generator is None
    with pytest.raises(ResourceLimitError):
        list(ctx.enumerate(ceiling=2 ** 8))
    with pytest.raises(ResourceLimitError):
        ctx.discrete_log(1)


def test_settings_ceilings_are_read_at_call_time(test_settings):
    ctx = FieldContext(2, 1, 17)
    assert ctx.generator is None
    with pytest.raises(ResourceLimitError):
        next(ctx.encoding_chunks())
    assert next(ctx.encoding_chunks(ceiling=2 ** 17)).size > 0
    inside = FieldContext(2, 1, 8)
    assert inside.generator is not None
    assert sum(block.size for block in inside.encoding_chunks()) == 2 ** 8
