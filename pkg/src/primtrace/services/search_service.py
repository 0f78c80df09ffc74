"""
Search Service
Primitive elements inside trace fibers: counting, exhaustive and two-step
(lift) witness search, and independent witness re-validation.
"""

import logging
from typing import Dict, Optional, Set

import numpy as np

from ..core.exceptions import StrategyError
from ..core.models import FindStrategyEnum
from .field_service import FieldContext, FieldElement
from .trace_service import TraceSpec, fiber_mask_chunks

logger = logging.getLogger(__name__)


def primitive_mask(ctx: FieldContext, encodings: Optional[np.ndarray] = None) -> np.ndarray:
    """True where the encoded element generates the multiplicative group"""
    logs = ctx.log_table if encodings is None else ctx.log_table[np.asarray(encodings, dtype=np.int64)]
    return (logs >= 0) & (np.gcd(logs, ctx.order) == 1)


def count_primitive_with_traces(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> int:
    """N(n, d, a): primitive elements carrying every prescribed trace"""
    total = 0
    for block, mask in fiber_mask_chunks(ctx, spec, ceiling):
        total += int(np.count_nonzero(mask & primitive_mask(ctx, block)))
    return total


def find_exhaustive(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> Optional[FieldElement]:
    """First primitive element of the fiber in encoding order, or None after a full scan"""
    for block, mask in fiber_mask_chunks(ctx, spec, ceiling):
        hits = mask & primitive_mask(ctx, block)
        if hits.any():
            return ctx.decode(int(block[int(np.argmax(hits))]))
    return None


def first_primitive_by_trace(ctx: FieldContext, d: int, ceiling: Optional[int] = None) -> Dict[int, int]:
    """For every value of Tr_{n/d} taken by a primitive element, the first such element"""
    first: Dict[int, int] = {}
    for block in ctx.encoding_chunks(ceiling):
        primitive = primitive_mask(ctx, block)
        traces = ctx.trace_encodings(d, block[primitive])
        values, index = np.unique(traces, return_index=True)
        candidates = block[primitive]
        for value, position in zip(values.tolist(), index.tolist()):
            first.setdefault(value, int(candidates[position]))
    return first


def primitive_trace_image(ctx: FieldContext, d: int, ceiling: Optional[int] = None) -> Set[int]:
    return set(first_primitive_by_trace(ctx, d, ceiling))


def find_lift(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> Optional[FieldElement]:
    """
    Two-step construction for lcm(d) = L < n: pick theta != 0 in GF(q^L)
    with Tr_{L/d_i}(theta) = a_i, then a primitive alpha with
    Tr_{n/L}(alpha) = theta. Transitivity of the trace gives the targets.
    """
    lcm_value = spec.tuple.lcm_value
    if lcm_value == ctx.n:
        raise StrategyError(f"lift needs lcm(d) < n, but lcm{spec.tuple.describe()} = {ctx.n}")
    candidates = ctx.subfield_encodings(lcm_value)
    ok = candidates != 0
    for d, target in zip(spec.tuple.entries, spec.target_encodings):
        ok &= ctx.apply_matrix(ctx.relative_trace_matrix(lcm_value, d), candidates) == target
    thetas = candidates[ok]
    if thetas.size == 0:
        logger.debug("no nonzero intermediate element carries the prescribed traces")
        return None
    first = first_primitive_by_trace(ctx, lcm_value, ceiling)
    for theta in thetas.tolist():
        if theta in first:
            logger.debug(f"lift through theta={theta} in GF({ctx.q}^{lcm_value})")
            return ctx.decode(first[theta])
    return None


def find_witness(ctx: FieldContext, spec: TraceSpec, strategy: FindStrategyEnum = FindStrategyEnum.EXHAUSTIVE, ceiling: Optional[int] = None) -> Optional[FieldElement]:
    try:
        strategy = FindStrategyEnum(strategy)
    except ValueError:
        raise StrategyError(f"unknown search strategy {strategy!r}")
    if strategy == FindStrategyEnum.LIFT:
        return find_lift(ctx, spec, ceiling)
    return find_exhaustive(ctx, spec, ceiling)


def revalidate_witness(ctx: FieldContext, spec: TraceSpec, x: FieldElement) -> bool:
    """Re-check primitivity and every trace with single-element field operations"""
    if not ctx.is_primitive(x):
        return False
    return all(ctx.trace(x, d) == a for d, a in zip(spec.tuple.entries, spec.targets))
