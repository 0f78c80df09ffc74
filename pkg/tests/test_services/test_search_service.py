import numpy as np
import pytest

from src.primtrace.core.exceptions import StrategyError
from src.primtrace.core.models import FindStrategyEnum
from src.primtrace.services.field_service import get_context
from src.primtrace.services.numtheory_service import euler_phi
from src.primtrace.services.search_service import (
    count_primitive_with_traces,
    find_exhaustive,
    find_lift,
    find_witness,
    primitive_mask,
    primitive_trace_image,
    revalidate_witness,
)
from src.primtrace.services.trace_service import admissible_targets, make_divisor_tuple, make_trace_spec


def test_primitive_mask_counts(gf8, gf9, gf64, gf729):
    for ctx in (gf8, gf9, gf64, gf729):
        assert int(np.count_nonzero(primitive_mask(ctx))) == euler_phi(ctx.order)
        assert not primitive_mask(ctx)[0]


def test_primitive_mask_agrees_with_single_element_test(gf64):
    mask = primitive_mask(gf64)
    for encoding in range(gf64.size):
        assert bool(mask[encoding]) == gf64.is_primitive(encoding)


def test_single_trace_images(gf8, gf9):
    assert primitive_trace_image(gf8, 1) == {0, 1}
    # n = 2: no primitive element has trace 0
    assert primitive_trace_image(gf9, 1) == {1, 2}


def test_trace_zero_family_has_no_primitive(gf64):
    spec = make_trace_spec(gf64, make_divisor_tuple(6, [2, 3]), [0, 0])
    assert count_primitive_with_traces(gf64, spec) == 0
    assert find_exhaustive(gf64, spec) is None


def test_exhaustive_witnesses_revalidate(gf64):
    divisor_tuple = make_divisor_tuple(6, [2, 3])
    found = 0
    for targets in admissible_targets(gf64, divisor_tuple):
        spec = make_trace_spec(gf64, divisor_tuple, targets)
        witness = find_exhaustive(gf64, spec)
        count = count_primitive_with_traces(gf64, spec)
        assert (witness is not None) == (count > 0)
        if witness is not None:
            found += 1
            assert revalidate_witness(gf64, spec, witness)
    assert found > 0


def test_lift_agrees_with_exhaustive():
    ctx = get_context(2, 12)
    divisor_tuple = make_divisor_tuple(12, [2, 3])
    for targets in admissible_targets(ctx, divisor_tuple):
        spec = make_trace_spec(ctx, divisor_tuple, targets)
        lifted = find_witness(ctx, spec, FindStrategyEnum.LIFT)
        scanned = find_witness(ctx, spec, FindStrategyEnum.EXHAUSTIVE)
        assert lifted is not None and scanned is not None
        assert revalidate_witness(ctx, spec, lifted)
        assert revalidate_witness(ctx, spec, scanned)


def test_lift_requires_proper_lcm(gf64):
    spec = make_trace_spec(gf64, make_divisor_tuple(6, [2, 3]), [0, 0])
    with pytest.raises(StrategyError):
        find_lift(gf64, spec)


def test_unknown_strategy(gf64):
    spec = make_trace_spec(gf64, make_divisor_tuple(6, [2, 3]), [0, 0])
    with pytest.raises(StrategyError):
        find_witness(gf64, spec, "random")
