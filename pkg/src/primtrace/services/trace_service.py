"""
Trace Service
Divisor tuples, lambda(d), admissibility of trace targets and exhaustive
counting of elements with prescribed traces in intermediate extensions.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import settings
from ..core.exceptions import (
    DivisibleEntriesError,
    InputValidationError,
    InvariantViolation,
    NonDivisorError,
    ResourceLimitError,
    SubfieldMembershipError,
    TupleSizeError,
)
from ..core.models import DivisorTuple
from .field_service import ElementLike, FieldContext, FieldElement
from .numtheory_service import divisors, euler_phi, sigma0

logger = logging.getLogger(__name__)

_CHUNK = 2 ** 16


def _lcm(values: Sequence[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def lambda_inclusion_exclusion(entries: Sequence[int]) -> int:
    """Alternating sum of gcds over all nonempty sub-collections of the entries"""
    total = 0
    for size in range(1, len(entries) + 1):
        sign = 1 if size % 2 else -1
        for subset in itertools.combinations(entries, size):
            total += sign * reduce(math.gcd, subset)
    return total


def lambda_lcm_degree(entries: Sequence[int]) -> int:
    """
    Degree of lcm(x^d_1 - 1, ..., x^d_k - 1): the sum of phi(e) over every e
    dividing at least one entry, since x^d - 1 is the product of the
    cyclotomic polynomials Phi_e with e | d.
    """
    orders = set()
    for d in entries:
        orders.update(divisors(d))
    return sum(euler_phi(e) for e in orders)


def make_divisor_tuple(n: int, entries: Sequence[int], allow_k1: bool = False) -> DivisorTuple:
    """Validate d = (d_1, ..., d_k) as a member of Lambda_k(n)"""
    if not isinstance(n, int) or n < 1:
        raise InputValidationError(f"n must be a positive integer, got {n!r}")
    values = []
    for d in entries:
        if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
            raise InputValidationError(f"tuple entry {d!r} is not an integer")
        values.append(int(d))
    values.sort()

    for d in values:
        if d < 1 or n % d or d == n:
            raise NonDivisorError(f"{d} is not a proper divisor of {n}")
    for i, small in enumerate(values):
        for large in values[i + 1:]:
            if large % small == 0:
                raise DivisibleEntriesError(f"{small} divides {large}")

    k = len(values)
    low = 0 if allow_k1 else 1
    if not low < k < sigma0(n):
        raise TupleSizeError(f"k={k} is outside ({low}, {sigma0(n)}) for n={n}")

    lam = lambda_inclusion_exclusion(values)
    lam_check = lambda_lcm_degree(values)
    if lam != lam_check:
        raise InvariantViolation(f"lambda{tuple(values)}: inclusion-exclusion {lam} != lcm degree {lam_check}")
    if lam > n - euler_phi(n):
        raise InvariantViolation(f"lambda{tuple(values)} = {lam} exceeds n - phi(n) = {n - euler_phi(n)}")

    return DivisorTuple(n=n, entries=tuple(values), k=k, D=sum(values), lambda_d=lam, lcm_value=_lcm(values))


def all_divisor_tuples(n: int, k: Optional[int] = None) -> Iterator[DivisorTuple]:
    """Every member of Lambda_k(n) (every k > 1 when k is None)"""
    proper = [d for d in divisors(n) if d < n]

    def extend(chosen: List[int], start: int) -> Iterator[List[int]]:
        if len(chosen) >= 2 and (k is None or len(chosen) == k):
            yield list(chosen)
        if k is not None and len(chosen) == k:
            return
        for index in range(start, len(proper)):
            candidate = proper[index]
            if all(candidate % d for d in chosen):
                chosen.append(candidate)
                yield from extend(chosen, index + 1)
                chosen.pop()

    for entries in extend([], 0):
        yield make_divisor_tuple(n, entries)


@dataclass(frozen=True)
class TraceSpec:
    """A divisor tuple together with trace targets a_i in GF(q^d_i)"""

    ctx: FieldContext
    tuple: DivisorTuple
    targets: Tuple[FieldElement, ...]
    admissible: bool

    @property
    def target_encodings(self) -> List[int]:
        return [self.ctx.encode(a) for a in self.targets]


def is_admissible(ctx: FieldContext, entries: Sequence[int], targets: Sequence[FieldElement]) -> bool:
    """Pairwise agreement of the traces of a_i and a_j down to GF(q^gcd(d_i, d_j))"""
    for i, j in itertools.combinations(range(len(entries)), 2):
        g = math.gcd(entries[i], entries[j])
        if ctx.relative_trace(targets[i], entries[i], g) != ctx.relative_trace(targets[j], entries[j], g):
            return False
    return True


def make_trace_spec(ctx: FieldContext, divisor_tuple: DivisorTuple, targets: Sequence[ElementLike]) -> TraceSpec:
    if ctx.n != divisor_tuple.n:
        raise InputValidationError(f"tuple is for n={divisor_tuple.n} but the field has n={ctx.n}")
    if len(targets) != divisor_tuple.k:
        raise InputValidationError(f"expected {divisor_tuple.k} targets, got {len(targets)}")
    elements = tuple(ctx._coerce(a) for a in targets)
    for index, (d, a) in enumerate(zip(divisor_tuple.entries, elements)):
        if not ctx.in_subfield(a, d):
            raise SubfieldMembershipError(f"target #{index} (encoding {ctx.encode(a)}) is not in GF({ctx.q}^{d})", index=index)
    admissible = is_admissible(ctx, divisor_tuple.entries, elements)
    return TraceSpec(ctx=ctx, tuple=divisor_tuple, targets=elements, admissible=admissible)


def _trace_block(ctx: FieldContext, entries: Sequence[int], block: np.ndarray) -> np.ndarray:
    """k x len(block) array of trace encodings"""
    return np.stack([ctx.trace_encodings(d, block) for d in entries])


def fiber_mask_chunks(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """(encodings, mask) per block; mask marks elements carrying every prescribed trace"""
    wanted = np.array(spec.target_encodings, dtype=np.int64)[:, None]
    for block in ctx.encoding_chunks(ceiling):
        traces = _trace_block(ctx, spec.tuple.entries, block)
        yield block, np.all(traces == wanted, axis=0)


def count_with_traces(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> int:
    """Exhaustive size of the fiber over the prescribed targets"""
    return sum(int(np.count_nonzero(mask)) for _, mask in fiber_mask_chunks(ctx, spec, ceiling))


def enumerate_with_traces(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> Iterator[FieldElement]:
    for block, mask in fiber_mask_chunks(ctx, spec, ceiling):
        for encoding in block[mask]:
            yield ctx.decode(int(encoding))


def reference_element(ctx: FieldContext, spec: TraceSpec, ceiling: Optional[int] = None) -> Optional[FieldElement]:
    """First element (in encoding order) carrying the prescribed traces"""
    return next(enumerate_with_traces(ctx, spec, ceiling), None)


def fiber_histogram(ctx: FieldContext, divisor_tuple: DivisorTuple, ceiling: Optional[int] = None) -> Dict[Tuple[int, ...], int]:
    """Fiber size of every target tuple that occurs, keyed by target encodings"""
    histogram: Counter = Counter()
    for block in ctx.encoding_chunks(ceiling):
        traces = _trace_block(ctx, divisor_tuple.entries, block)
        keys, counts = np.unique(traces.T, axis=0, return_counts=True)
        for key, count in zip(keys, counts):
            histogram[tuple(int(v) for v in key)] += int(count)
    return dict(histogram)


def admissible_targets(ctx: FieldContext, divisor_tuple: DivisorTuple, ceiling: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Every admissible target tuple, as encodings, in lexicographic order"""
    ceiling = settings.ZERO_SUM_CEILING if ceiling is None else ceiling
    if ctx.q ** divisor_tuple.D > ceiling:
        raise ResourceLimitError(f"q^D = {ctx.q}^{divisor_tuple.D} exceeds the target enumeration ceiling", limit=ceiling)
    entries = divisor_tuple.entries
    pools = [ctx.subfield_encodings(d) for d in entries]
    down: Dict[Tuple[int, int], Dict[int, int]] = {}
    for i, j in itertools.combinations(range(len(entries)), 2):
        g = math.gcd(entries[i], entries[j])
        for index in (i, j):
            key = (index, g)
            if key not in down:
                images = ctx.apply_matrix(ctx.relative_trace_matrix(entries[index], g), pools[index])
                down[key] = dict(zip(pools[index].tolist(), images.tolist()))
    for combo in itertools.product(*(pool.tolist() for pool in pools)):
        ok = True
        for i, j in itertools.combinations(range(len(entries)), 2):
            g = math.gcd(entries[i], entries[j])
            if down[(i, g)][combo[i]] != down[(j, g)][combo[j]]:
                ok = False
                break
        if ok:
            yield combo


def sumset_distribution(ctx: FieldContext, pools: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distinct sums x_1 + ... + x_r (x_i drawn from pools[i]) with their
    multiplicities, as (encodings, counts).
    """
    keys = np.zeros(1, dtype=np.int64)
    counts = np.ones(1, dtype=np.int64)
    for pool in pools:
        pool_digits = ctx.digits(pool)
        rows_per_block = max(1, _CHUNK // max(1, len(pool)))
        partial_keys, partial_counts = [], []
        for start in range(0, len(keys), rows_per_block):
            block_digits = ctx.digits(keys[start:start + rows_per_block])
            sums = (block_digits[:, None, :] + pool_digits[None, :, :]) % ctx.p
            encoded = ctx.from_digits(sums.reshape(-1, ctx.m))
            weights = np.repeat(counts[start:start + rows_per_block], len(pool))
            unique, inverse = np.unique(encoded, return_inverse=True)
            partial_keys.append(unique)
            partial_counts.append(np.bincount(inverse.ravel(), weights=weights).astype(np.int64))
        merged_keys = np.concatenate(partial_keys)
        merged_counts = np.concatenate(partial_counts)
        keys, inverse = np.unique(merged_keys, return_inverse=True)
        counts = np.bincount(inverse.ravel(), weights=merged_counts).astype(np.int64)
    return keys, counts


def zero_sum_tuple_count(ctx: FieldContext, divisor_tuple: DivisorTuple, ceiling: Optional[int] = None) -> int:
    """Exhaustive count of (x_1, ..., x_k) in GF(q^d_1) x ... x GF(q^d_k) with zero sum"""
    ceiling = settings.ZERO_SUM_CEILING if ceiling is None else ceiling
    if ctx.q ** divisor_tuple.D > ceiling:
        raise ResourceLimitError(f"q^D = {ctx.q}^{divisor_tuple.D} exceeds the zero-sum ceiling", limit=ceiling)
    pools = [ctx.subfield_encodings(d) for d in divisor_tuple.entries]
    # the last coordinate is forced to minus the partial sum
    keys, counts = sumset_distribution(ctx, pools[:-1])
    negated = ctx.from_digits((-ctx.digits(keys)) % ctx.p)
    hits = np.isin(negated, pools[-1])
    result = int(counts[hits].sum())
    logger.debug(f"zero-sum count for {divisor_tuple.describe()} over GF({ctx.q}): {result}")
    return result
