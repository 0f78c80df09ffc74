"""
Existence Service
Decision procedures for primitive elements with prescribed traces: the main
squarefree-divisor inequality, the lcm criterion, the coprime case analysis
with its table of ranges, the known exceptions and the verification suites.

Every decisive comparison is exact integer arithmetic or a real comparison
that only succeeds after the configured slack.
"""

import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import settings
from ..core.exceptions import InputValidationError, NotCoprimeError, ResourceLimitError
from ..core.models import (
    BoundParams,
    DivisorTuple,
    ExistenceVerdict,
    ReportRow,
    SuiteReport,
    VerdictReasonEnum,
    VerdictStatusEnum,
    WModeEnum,
)
from .field_service import FieldContext, get_context, split_prime_power
from .numtheory_service import (
    C_CEILING_8,
    LOGLOG_FACTOR,
    c_ceiling,
    c_constant,
    factorize_power_minus_one,
    factorize_power_minus_one_partial,
    is_probable_prime,
    log_w_bound_loglog,
    primes_up_to,
    squarefree_divisor_count,
    w_bounds,
)
from .search_service import primitive_mask, primitive_trace_image
from .trace_service import TraceSpec, make_divisor_tuple, make_trace_spec

logger = logging.getLogger(__name__)

B2_LOGLOG_THRESHOLD = 6.7
B3_LOGLOG_THRESHOLD = 26.1
B3_MIN_D2 = 38

# (d1, d2, minimal q, a, d2 is a lower bound)
RANGE_TABLE: Tuple[Tuple[int, int, int, int, bool], ...] = (
    (7, 11, 2, 4, True),
    (7, 10, 5, 4, False),
    (7, 9, 8, 4, False),
    (7, 8, 37, 8, False),
    (6, 15, 2, 4, True),
    (6, 13, 3, 4, False),
    (6, 11, 3, 8, False),
    (6, 7, 11, 8, False),
    (5, 19, 2, 8, True),
    (5, 14, 3, 8, True),
    (5, 12, 4, 8, True),
    (5, 11, 5, 8, False),
    (5, 9, 9, 8, False),
    (5, 8, 17, 8, False),
    (5, 7, 53, 8, False),
    (5, 6, 839, 8, False),
    (4, 31, 2, 8, True),
    (4, 23, 3, 8, True),
    (4, 19, 4, 8, True),
    (4, 17, 5, 8, False),
    (4, 15, 7, 8, False),
    (4, 13, 13, 8, False),
    (4, 11, 29, 8, False),
    (4, 9, 274, 8, False),
    (4, 7, 20390000, 8, False),
    (3, 114, 2, 8, True),
    (3, 78, 3, 8, True),
    (3, 65, 4, 8, True),
    (3, 58, 5, 8, True),
    (3, 52, 7, 8, True),
    (3, 49, 8, 8, True),
    (3, 47, 9, 8, False),
    (3, 46, 11, 8, False),
    (3, 43, 13, 8, True),
    (3, 40, 17, 8, True),
    (3, 38, 23, 8, False),
)

N30_FIELDS = (2, 3, 4, 5, 7, 8, 9, 11, 13)
N42_FIELDS = (2, 3, 4)
EXCEPTION_FAMILY = ((2, 3), (2, 5), (3, 3), (4, 3), (5, 3))


# Comparison helpers
def _holds(lhs: float, rhs: float, slack: Optional[float] = None) -> bool:
    """lhs >= rhs, accepted only with room to spare"""
    slack = settings.FLOAT_SLACK if slack is None else slack
    return lhs - rhs >= slack * max(1.0, abs(lhs), abs(rhs))


def _half_power(q: int, exponent2: int):
    """q^(exponent2/2), exact when the exponent is a nonnegative integer"""
    if exponent2 >= 0 and exponent2 % 2 == 0:
        return q ** (exponent2 // 2)
    try:
        return math.exp(exponent2 / 2 * math.log(q))
    except OverflowError:
        return math.inf


def _pairwise_coprime(entries: Sequence[int]) -> bool:
    return all(math.gcd(a, b) == 1 for i, a in enumerate(entries) for b in entries[i + 1:])


def order_factorization(q: int, n: int, budget: Optional[int] = None, partial: bool = False):
    """Factorization of q^n - 1, computed as p^(s*n) - 1 over the prime p"""
    p, s = split_prime_power(q)
    if partial:
        return factorize_power_minus_one_partial(p, s * n, budget)
    return factorize_power_minus_one(p, s * n, budget)


def _verdict(status: VerdictStatusEnum, reason: VerdictReasonEnum, **evidence: Any) -> ExistenceVerdict:
    return ExistenceVerdict(status=status, reason=reason, evidence=evidence)


# Criteria
def check_main_inequality(q: int, n: int, divisor_tuple: DivisorTuple, budget: Optional[int] = None) -> ExistenceVerdict:
    """
    q^(n/2 - lambda) >= W(q^n - 1), decided on the squared form
    q^(n - 2 lambda) >= W^2 in integers.
    """
    if divisor_tuple.n != n:
        raise InputValidationError(f"tuple is for n={divisor_tuple.n}, not {n}")
    factorization = order_factorization(q, n, budget, partial=False)
    w = squarefree_divisor_count(factorization)
    exponent2 = n - 2 * divisor_tuple.lambda_d
    holds = exponent2 >= 0 and q ** exponent2 >= w * w
    return _verdict(
        VerdictStatusEnum.EXISTS if holds else VerdictStatusEnum.INCONCLUSIVE,
        VerdictReasonEnum.MAIN_INEQUALITY,
        inequality="q^(n/2-lambda) >= W(q^n-1)",
        lhs=_half_power(q, exponent2),
        rhs=w,
        W=w,
        omega=factorization.omega,
        w_mode=WModeEnum.EXACT_W.value,
        holds=holds,
    )


def main_inequality_bounded(q: int, n: int, divisor_tuple: DivisorTuple, budget: Optional[int] = None) -> ExistenceVerdict:
    """
    The main inequality without a complete factorization of q^n - 1: exact
    bounds on W from a partial factorization first, then the log-log bound.
    """
    factorization = order_factorization(q, n, budget, partial=True)
    if factorization.complete:
        return check_main_inequality(q, n, divisor_tuple, budget)
    lower, upper = w_bounds(factorization)
    exponent2 = n - 2 * divisor_tuple.lambda_d
    lhs = _half_power(q, exponent2)
    base = dict(inequality="q^(n/2-lambda) >= W(q^n-1)", lhs=lhs, W_lower=lower, W_upper=upper)

    if exponent2 < 0 or q ** exponent2 < lower * lower:
        return _verdict(
            VerdictStatusEnum.INCONCLUSIVE, VerdictReasonEnum.MAIN_INEQUALITY,
            rhs=lower, w_mode=WModeEnum.PARTIAL_FACTORIZATION.value, holds=False, **base,
        )
    if q ** exponent2 >= upper * upper:
        return _verdict(
            VerdictStatusEnum.EXISTS, VerdictReasonEnum.MAIN_INEQUALITY,
            rhs=upper, w_mode=WModeEnum.PARTIAL_FACTORIZATION.value, holds=True, **base,
        )

    log_lhs = exponent2 / 2 * math.log(q)
    log_rhs = log_w_bound_loglog(q ** n)
    holds = _holds(log_lhs, log_rhs)
    logger.debug(f"log-log fallback for q={q}, n={n}: {log_lhs:.6g} vs {log_rhs:.6g}")
    return _verdict(
        VerdictStatusEnum.EXISTS if holds else VerdictStatusEnum.INCONCLUSIVE,
        VerdictReasonEnum.MAIN_INEQUALITY,
        rhs=_safe_exp(log_rhs), log_lhs=log_lhs, log_rhs=log_rhs,
        w_mode=WModeEnum.LOGLOG_BOUND.value, holds=holds, undecided=not holds, **base,
    )


def _safe_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


def check_lcm_criterion(divisor_tuple: DivisorTuple) -> ExistenceVerdict:
    holds = divisor_tuple.lcm_value < divisor_tuple.n
    return _verdict(
        VerdictStatusEnum.EXISTS if holds else VerdictStatusEnum.INCONCLUSIVE,
        VerdictReasonEnum.LCM_CRITERION,
        inequality="lcm(d) < n",
        lhs=divisor_tuple.lcm_value,
        rhs=divisor_tuple.n,
        holds=holds,
    )


def bound_params(q: int, n: int, a: int, use_ceiling: bool = False) -> BoundParams:
    """c_{q^n-1,a} either evaluated or replaced by its published ceiling"""
    if use_ceiling:
        ceiling = c_ceiling(q, a)
        if ceiling is None:
            raise InputValidationError(f"no published ceiling for a={a}")
        return BoundParams(a=a, c_value=ceiling, w_mode=WModeEnum.C_CONSTANT_BOUND, t_even=q % 2 == 1)
    return BoundParams(a=a, c_value=c_constant(q, n, a), w_mode=WModeEnum.C_CONSTANT_BOUND, t_even=q % 2 == 1)


def sufficient_inequality_sides(q: int, n: int, D: int, k: int, a: int, c_value: float) -> Tuple[float, float]:
    """n/2 - D + k - 1 against n/a + log_q(c)"""
    return n / 2 - D + k - 1, n / a + math.log(c_value) / math.log(q)


def check_sufficient_inequality(q: int, n: int, divisor_tuple: DivisorTuple, params: Optional[BoundParams] = None, a: int = 8) -> bool:
    if not _pairwise_coprime(divisor_tuple.entries):
        raise NotCoprimeError(f"entries of {divisor_tuple.describe()} are not pairwise coprime")
    params = bound_params(q, n, a) if params is None else params
    lhs, rhs = sufficient_inequality_sides(q, n, divisor_tuple.D, divisor_tuple.k, params.a, params.c_value)
    return _holds(lhs, rhs)


def tail_threshold_loglog(d1: int, d2: int) -> Optional[float]:
    """
    ln ln q_0 such that the main inequality holds for (d1, d2), n = d1*d2,
    whenever ln ln q >= it; None when the log-log bound never suffices.

    W(q^n - 1) < (q^n)^(0.96 / ln ln q^n) turns the main inequality into
    ln ln q >= 0.96 n / (n/2 - lambda) - ln n. For d1 = 3 and 17 <= d2 <= 37
    the k = 2 sufficient inequality with a = 8 and the ceiling of c gives
    ln q >= ln 4514.7 / (d2/8 - 2); the smaller threshold wins.
    """
    n = d1 * d2
    margin = n / 2 - (d1 + d2 - 1)
    if margin <= 0:
        return None
    threshold = LOGLOG_FACTOR * n / margin - math.log(n)
    if d1 == 3 and 17 <= d2 <= 37:
        slope = n / 2 - d1 - d2 + 1 - n / 8
        if slope > 0:
            threshold = min(threshold, math.log(math.log(C_CEILING_8) / slope))
    return threshold


def _is_tail_case(d1: int, d2: int) -> bool:
    return (d1, d2) == (4, 5) or (d1 == 3 and 5 <= d2 <= 37)


def check_cop(q: int, divisor_tuple: DivisorTuple) -> ExistenceVerdict:
    """Sufficient conditions for pairwise coprime entries, case by case"""
    entries = divisor_tuple.entries
    if not _pairwise_coprime(entries):
        raise NotCoprimeError(f"entries of {divisor_tuple.describe()} are not pairwise coprime")
    if divisor_tuple.lcm_value < divisor_tuple.n:
        return check_lcm_criterion(divisor_tuple)
    exists, inconclusive = VerdictStatusEnum.EXISTS, VerdictStatusEnum.INCONCLUSIVE

    if divisor_tuple.k >= 3:
        return _verdict(exists, VerdictReasonEnum.COP_CASE_A, condition="k >= 3", lhs=divisor_tuple.k, rhs=3)
    if divisor_tuple.k < 2:
        raise InputValidationError("the coprime case analysis needs k >= 2")

    d1, d2 = entries
    loglog_q = math.log(math.log(q))

    if d1 >= 5:
        reason = VerdictReasonEnum.COP_CASE_B1
        if (d1, d2) == (5, 6):
            status = exists if q >= 5 else inconclusive
            return _verdict(status, reason, condition="q >= 5 for (5,6)", lhs=q, rhs=5)
        return _verdict(exists, reason, condition="d1 >= 5", lhs=d1, rhs=5)

    if d1 == 4:
        reason = VerdictReasonEnum.COP_CASE_B2
        if d2 >= 11:
            return _verdict(exists, reason, condition="d2 >= 11", lhs=d2, rhs=11)
        if d2 >= 9 and q >= 3:
            return _verdict(exists, reason, condition="d2 >= 9 and q >= 3", lhs=q, rhs=3)
        if d2 in (5, 7) and loglog_q >= B2_LOGLOG_THRESHOLD:
            return _verdict(exists, reason, condition="ln ln q >= 6.7", lhs=loglog_q, rhs=B2_LOGLOG_THRESHOLD)
        return _tail_or_inconclusive(reason, d1, d2, loglog_q)

    if d1 == 3:
        reason = VerdictReasonEnum.COP_CASE_B3
        if d2 >= B3_MIN_D2:
            return _verdict(exists, reason, condition="d2 >= 38", lhs=d2, rhs=B3_MIN_D2)
        if d2 >= 5 and loglog_q >= B3_LOGLOG_THRESHOLD:
            return _verdict(exists, reason, condition="ln ln q >= 26.1", lhs=loglog_q, rhs=B3_LOGLOG_THRESHOLD)
        return _tail_or_inconclusive(reason, d1, d2, loglog_q)

    # d1 = 2 with lcm = n: the main inequality can never hold and genuine
    # exceptions exist for some targets
    return _verdict(
        inconclusive, VerdictReasonEnum.D1_EQUALS_TWO_FAMILY,
        condition="d1 = 2 and lcm(d) = n", lhs=d1, rhs=2,
    )


def _tail_or_inconclusive(reason: VerdictReasonEnum, d1: int, d2: int, loglog_q: float) -> ExistenceVerdict:
    threshold = tail_threshold_loglog(d1, d2) if _is_tail_case(d1, d2) else None
    if threshold is not None and _holds(loglog_q, threshold):
        return _verdict(
            VerdictStatusEnum.EXISTS, reason,
            condition="ln ln q >= ln ln q_0", lhs=loglog_q, rhs=threshold, q0_loglog=threshold,
        )
    return _verdict(
        VerdictStatusEnum.INCONCLUSIVE, reason,
        condition="no published range applies", lhs=loglog_q, rhs=threshold, q0_loglog=threshold,
    )


def known_exception(ctx: FieldContext, spec: TraceSpec) -> Optional[ExistenceVerdict]:
    """
    A target a_i = 0 over GF(q^d_i) with n/d_i = 2, or with n/d_i = 3 and
    q^d_i = 4, rules out every primitive element: such a trace-zero element
    has order dividing 2(q^d_i - 1) (resp. lies in the single-trace exception).
    """
    entries = spec.tuple.entries
    for index, (d, a) in enumerate(zip(entries, spec.targets)):
        if not a.is_zero:
            continue
        degree = ctx.n // d
        sub_q = ctx.q ** d
        if degree == 2:
            reason = VerdictReasonEnum.COHEN_EXCEPTION if spec.tuple.k == 1 else VerdictReasonEnum.D1_EQUALS_TWO_FAMILY
            witness = (
                f"Tr_{{{ctx.n}/{d}}}(x) = 0 forces x^(q^{d}) = -x, so x^(2(q^{d}-1)) = 1 "
                f"and no trace-zero element of GF({ctx.q}^{ctx.n}) is primitive"
            )
        elif degree == 3 and sub_q == 4:
            reason = VerdictReasonEnum.COHEN_EXCEPTION
            witness = f"single-trace exception: GF(4^3) has no primitive element of trace 0 over GF(4) (target #{index})"
        else:
            continue
        return _verdict(
            VerdictStatusEnum.KNOWN_EXCEPTION, reason,
            witness=witness, index=index, subfield_degree=d, relative_degree=degree,
        )
    return None


def _summary(verdict: ExistenceVerdict) -> Dict[str, Any]:
    return {
        "reason": verdict.reason.value,
        "status": verdict.status.value,
        "lhs": verdict.evidence.get("lhs"),
        "rhs": verdict.evidence.get("rhs"),
    }


def _with_chain(verdict: ExistenceVerdict, chain: List[Dict[str, Any]]) -> ExistenceVerdict:
    return ExistenceVerdict(status=verdict.status, reason=verdict.reason, evidence={**verdict.evidence, "chain": chain})


def _decide_single_trace(q: int, divisor_tuple: DivisorTuple, spec: Optional[TraceSpec]) -> ExistenceVerdict:
    d = divisor_tuple.entries[0]
    degree = divisor_tuple.n // d
    if spec is not None:
        exception = known_exception(spec.ctx, spec)
        if exception is not None:
            return exception
    risky = degree == 2 or (degree == 3 and q ** d == 4)
    if risky and (spec is None or spec.targets[0].is_zero):
        return _verdict(
            VerdictStatusEnum.INCONCLUSIVE, VerdictReasonEnum.COHEN_EXCEPTION,
            condition="target 0 is the single-trace exception", lhs=degree, rhs=3 if q ** d == 4 else 2,
        )
    return _verdict(
        VerdictStatusEnum.EXISTS, VerdictReasonEnum.COHEN_THEOREM,
        condition="single prescribed trace outside the exceptions", lhs=degree, rhs=2,
    )


def decide(q: int, n: int, divisor_tuple: DivisorTuple, spec: Optional[TraceSpec] = None, budget: Optional[int] = None) -> ExistenceVerdict:
    """
    Run the checkers in priority order (known exception, lcm criterion, main
    inequality, coprime case analysis) and return the first decisive verdict,
    carrying the evidence of every step taken.
    """
    if divisor_tuple.n != n:
        raise InputValidationError(f"tuple is for n={divisor_tuple.n}, not {n}")
    if divisor_tuple.k == 1:
        return _decide_single_trace(q, divisor_tuple, spec)

    chain: List[Dict[str, Any]] = []
    if spec is not None:
        if not spec.admissible:
            return _verdict(
                VerdictStatusEnum.INCONCLUSIVE, VerdictReasonEnum.NONE_APPLICABLE,
                admissible=False, condition="targets are not admissible; the fiber is empty", chain=chain,
            )
        exception = known_exception(spec.ctx, spec)
        if exception is not None:
            return exception

    lcm_verdict = check_lcm_criterion(divisor_tuple)
    chain.append(_summary(lcm_verdict))
    if lcm_verdict.decisive:
        return _with_chain(lcm_verdict, chain)

    try:
        main_verdict = check_main_inequality(q, n, divisor_tuple, budget)
    except ResourceLimitError as e:
        logger.warning(f"{e.message}; falling back to W bounds")
        main_verdict = main_inequality_bounded(q, n, divisor_tuple, budget)
    chain.append(_summary(main_verdict))
    if main_verdict.decisive:
        return _with_chain(main_verdict, chain)

    last = main_verdict
    if _pairwise_coprime(divisor_tuple.entries):
        last = check_cop(q, divisor_tuple)
        chain.append(_summary(last))
        if last.decisive:
            return _with_chain(last, chain)

    reason = VerdictReasonEnum.NONE_APPLICABLE
    if divisor_tuple.k == 2 and divisor_tuple.entries[0] == 2:
        reason = VerdictReasonEnum.D1_EQUALS_TWO_FAMILY
    return _verdict(
        VerdictStatusEnum.INCONCLUSIVE, reason,
        lhs=last.evidence.get("lhs"), rhs=last.evidence.get("rhs"), chain=chain,
    )


# Verification suites
def _row(row_id: str, suite: str, passed: bool, **fields: Any) -> ReportRow:
    row = ReportRow(row_id=row_id, suite=suite, passed=passed, **fields)
    logger.debug(row.to_line())
    return row


def prime_powers_up_to(limit: int) -> List[int]:
    result = []
    for p in primes_up_to(limit):
        power = p
        while power <= limit:
            result.append(power)
            power *= p
    return sorted(result)


def largest_prime_power_below(bound: int) -> int:
    candidate = bound - 1
    while candidate >= 2:
        try:
            split_prime_power(candidate)
            return candidate
        except InputValidationError:
            candidate -= 1
    raise InputValidationError(f"no prime power below {bound}")


def verify_table1() -> SuiteReport:
    """
    Each row of the table of ranges: the k = 2 sufficient inequality at the
    row's minimal q (and minimal d2), once with the evaluated c constant and
    once with the published ceiling of c, the latter also at q_min + 1 when
    the parity of q^n - 1 changes the ceiling.
    """
    report = SuiteReport(suite="table1")
    for d1, d2, q_min, a, open_ended in RANGE_TABLE:
        n = d1 * d2
        label = f"T1-{d1}-{d2}"
        c_value = c_constant(q_min, n, a)
        lhs, rhs = sufficient_inequality_sides(q_min, n, d1 + d2, 2, a, c_value)
        report.rows.append(_row(
            label, "table1", _holds(lhs, rhs),
            q=q_min, n=n, d=[d1, d2], a_param=a, lhs=lhs, rhs=rhs,
            verdict="holds" if _holds(lhs, rhs) else "fails", reason="k2_sufficient_inequality",
            details={"c": c_value, "d2_open_ended": open_ended},
        ))
        ceiling_qs = [q_min]
        if a == 4 and q_min % 2 == 0:
            ceiling_qs.append(q_min + 1)
        for q in ceiling_qs:
            ceiling = c_ceiling(q, a)
            lhs, rhs = sufficient_inequality_sides(q, n, d1 + d2, 2, a, ceiling)
            report.rows.append(_row(
                f"{label}-ceiling-q{q}", "table1", _holds(lhs, rhs),
                q=q, n=n, d=[d1, d2], a_param=a, lhs=lhs, rhs=rhs,
                verdict="holds" if _holds(lhs, rhs) else "fails", reason="k2_sufficient_inequality_ceiling",
                details={"c": ceiling},
            ))
    logger.info(f"table1: {len(report.failures)} failures out of {len(report.rows)} rows")
    return report


def _is_stated_exception(q: int, d1: int, d2: int) -> bool:
    return ((d1, d2) == (5, 6) and q < 5) or (q, d1, d2) == (2, 4, 9)


def _range_thresholds() -> Dict[Tuple[int, int], int]:
    """
    Minimal q of the table for every coprime (d1, d2) below the last row of
    its d1, i.e. every pair the table leaves exceptional triples for.
    """
    thresholds: Dict[Tuple[int, int], int] = {}
    by_d1: Dict[int, List[Tuple[int, int]]] = {}
    for d1, d2, q_min, _, _ in RANGE_TABLE:
        by_d1.setdefault(d1, []).append((d2, q_min))
    for d1, rows in by_d1.items():
        rows.sort()
        for d2 in range(rows[0][0], rows[-1][0]):
            if math.gcd(d1, d2) != 1 or (d1, d2) == (4, 7):
                continue
            thresholds[(d1, d2)] = min(q_min for row_d2, q_min in rows if row_d2 <= d2)
    return thresholds


def exceptional_triples() -> List[Tuple[int, int, int]]:
    """
    Every (q, d1, d2) the table leaves out, minus the stated exceptions
    (q, 5, 6) with q < 5 and (2, 4, 9). (4, 7) is skipped: its q-range
    ends above 2 * 10^7.
    """
    triples = []
    for (d1, d2), threshold in sorted(_range_thresholds().items()):
        for q in prime_powers_up_to(threshold - 1):
            if not _is_stated_exception(q, d1, d2):
                triples.append((q, d1, d2))
    return triples


def boundary_triples() -> List[Tuple[int, int, int]]:
    """
    (q, d1, d2) just outside each finite q-range of the table: the largest
    prime power below the row's minimal q and the smallest q that is not a
    stated exception, at the smallest admissible d2.
    """
    triples = []
    for d1, d2, q_min, _, _ in RANGE_TABLE:
        if q_min <= 2 or (d1, d2) == (4, 7):
            continue
        while math.gcd(d1, d2) != 1:
            d2 += 1
        below = [q for q in prime_powers_up_to(q_min - 1) if not _is_stated_exception(q, d1, d2)]
        for q in sorted({below[0], below[-1]}, reverse=True):
            triples.append((q, d1, d2))
    return triples


def _main_inequality_row(row_id: str, q: int, entries: Sequence[int], expect: bool, budget: Optional[int], bounded: bool) -> ReportRow:
    n = math.lcm(*entries)
    divisor_tuple = make_divisor_tuple(n, entries)
    try:
        verdict = check_main_inequality(q, n, divisor_tuple, budget)
    except ResourceLimitError as e:
        if not bounded:
            return _row(row_id, "small_cases", False, q=q, n=n, d=list(entries), verdict="resource_limit", details={"error": e.message})
        verdict = main_inequality_bounded(q, n, divisor_tuple, settings.SWEEP_RHO_BUDGET)
    holds = verdict.status == VerdictStatusEnum.EXISTS
    undecided = bool(verdict.evidence.get("undecided"))
    return _row(
        row_id, "small_cases", holds == expect and not undecided,
        q=q, n=n, d=list(entries), lhs=verdict.evidence["lhs"], rhs=verdict.evidence["rhs"],
        verdict="holds" if holds else ("undecided" if undecided else "fails"),
        reason=verdict.evidence.get("w_mode", ""),
        details={"expected": "holds" if expect else "fails", "lambda": divisor_tuple.lambda_d},
    )


def verify_small_cases(
    budget: Optional[int] = None,
    include_boundary: bool = True,
    max_q_34: int = 101,
    full_sweep: bool = False,
) -> SuiteReport:
    """
    The directly verified cases of the main inequality: (2,3,5) with n = 30
    and (2,3,7) with n = 42 must hold; (q,5,6) for q < 5, (2,4,9) and every
    (q,3,4) must fail while (q,5,6) for 5 <= q <= 9 holds; the boundary
    triples must hold. ``full_sweep`` replaces the boundary triples by every
    triple the table leaves out.
    """
    report = SuiteReport(suite="small_cases")
    for q in N30_FIELDS:
        report.rows.append(_main_inequality_row(f"S30-q{q}", q, (2, 3, 5), True, budget, bounded=False))
    for q in N42_FIELDS:
        report.rows.append(_main_inequality_row(f"S42-q{q}", q, (2, 3, 7), True, budget, bounded=False))
    for q in (2, 3, 4):
        report.rows.append(_main_inequality_row(f"X56-q{q}", q, (5, 6), False, budget, bounded=False))
    for q in (5, 7, 8, 9):
        report.rows.append(_main_inequality_row(f"H56-q{q}", q, (5, 6), True, budget, bounded=False))
    report.rows.append(_main_inequality_row("X49-q2", 2, (4, 9), False, budget, bounded=False))
    for q in prime_powers_up_to(max_q_34):
        report.rows.append(_main_inequality_row(f"X34-q{q}", q, (3, 4), False, budget, bounded=False))
    if include_boundary:
        triples = exceptional_triples() if full_sweep else boundary_triples()
        for q, d1, d2 in triples:
            report.rows.append(_main_inequality_row(f"B-{d1}-{d2}-q{q}", q, (d1, d2), True, settings.SWEEP_RHO_BUDGET, bounded=True))
    logger.info(f"small_cases: {len(report.failures)} failures out of {len(report.rows)} rows")
    return report


def verify_cohen(ceiling: int = 2 ** 12) -> SuiteReport:
    """
    Exhaustive single-trace sweep over every GF(q^n), n >= 2, q^n <= ceiling:
    the traces over GF(q) missed by primitive elements must be exactly 0 for
    n = 2 and for (q, n) = (4, 3), and nothing otherwise.
    """
    report = SuiteReport(suite="cohen")
    for q in prime_powers_up_to(math.isqrt(ceiling)):
        n = 2
        while q ** n <= ceiling:
            ctx = get_context(q, n)
            image = primitive_trace_image(ctx, 1)
            missing = sorted(set(ctx.subfield_encodings(1).tolist()) - image)
            expected = [0] if n == 2 or (q, n) == (4, 3) else []
            report.rows.append(_row(
                f"cohen-q{q}-n{n}", "cohen", missing == expected,
                q=q, n=n, d=[1], lhs=len(missing), rhs=len(expected),
                verdict=f"exceptions={missing}", reason="single_trace",
            ))
            n += 1
    logger.info(f"cohen: {len(report.failures)} failures out of {len(report.rows)} rows")
    return report


def verify_exception_family(pairs: Iterable[Tuple[int, int]] = EXCEPTION_FAMILY) -> SuiteReport:
    """
    n = 2N with N odd: no element of trace 0 over GF(q^N) is primitive, and
    every nonzero such element x has x^(2(q^N - 1)) = 1.
    """
    report = SuiteReport(suite="exceptions")
    for q, big_n in pairs:
        n = 2 * big_n
        ctx = get_context(q, n)
        zero_trace: List[np.ndarray] = []
        for block in ctx.encoding_chunks():
            zero_trace.append(block[ctx.trace_encodings(big_n, block) == 0])
        elements = np.concatenate(zero_trace)
        primitive_count = int(np.count_nonzero(primitive_mask(ctx, elements)))
        nonzero = elements[elements != 0]
        exponent = 2 * (q ** big_n - 1)
        logs = ctx.log_table[nonzero]
        order_violations = int(np.count_nonzero((logs * exponent) % ctx.order))
        spec = make_trace_spec(ctx, make_divisor_tuple(n, (2, big_n)), (0, 0))
        flagged = known_exception(ctx, spec) is not None
        passed = primitive_count == 0 and order_violations == 0 and flagged and len(elements) == q ** big_n
        report.rows.append(_row(
            f"family-q{q}-N{big_n}", "exceptions", passed,
            q=q, n=n, d=[2, big_n], lhs=primitive_count, rhs=0,
            verdict="no primitive trace-zero element" if primitive_count == 0 else "primitive trace-zero element found",
            reason="d1_equals_two_family",
            details={"zero_trace_count": int(len(elements)), "order_violations": order_violations, "flagged": flagged},
        ))
    logger.info(f"exceptions: {len(report.failures)} failures out of {len(report.rows)} rows")
    return report
