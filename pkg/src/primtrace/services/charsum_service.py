"""
Character Sum Service
Multiplicative and additive characters of GF(q^n), Gauss sums, the
character-sum forms of the primitivity and trace indicators, and the full
character expansion of the number of primitive elements with prescribed
traces.

Multiplicative characters are eta_j(g^k) = exp(2 pi i j k / (q^n - 1)) for the
context generator g, with eta_j(0) = 0; eta_j has order (q^n - 1)/gcd(j, q^n - 1).
Additive characters are chi_c(x) = exp(2 pi i T(c x) / p), T the absolute
trace of GF(q^n). Everything here is numeric verification; no result of this
module decides an existence question.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.exceptions import InputValidationError, InvariantViolation, NonDivisorError, ResourceLimitError
from ..core.models import CharacterFormulaReport, ComplexValue, ReportRow, SBoundReport, SuiteReport
from .field_service import ElementLike, FieldContext, get_context
from .numtheory_service import divisors, euler_phi, mobius, squarefree_divisor_count
from .search_service import count_primitive_with_traces, primitive_mask
from .trace_service import (
    TraceSpec,
    admissible_targets,
    all_divisor_tuples,
    make_divisor_tuple,
    make_trace_spec,
    reference_element,
    sumset_distribution,
)

logger = logging.getLogger(__name__)

_UNITY_TOLERANCE = 1e-12
_ROW_BLOCK = 256


class CharacterTable:
    """Discrete logs, roots of unity and trace data for one field context"""

    def __init__(self, ctx: FieldContext, ceiling: Optional[int] = None):
        ceiling = settings.CHARSUM_CEILING if ceiling is None else ceiling
        if ctx.size > ceiling:
            raise ResourceLimitError(f"GF({ctx.q}^{ctx.n}) is above the character table ceiling", limit=ceiling)
        self.ctx = ctx
        self.size = ctx.size
        self.order = ctx.order
        self.dlog = ctx.log_table
        self.exp = ctx.exp_table
        self.unity = np.exp(2j * np.pi * np.arange(self.order) / self.order)
        self.unity_p = np.exp(2j * np.pi * np.arange(ctx.p) / ctx.p)
        for roots in (self.unity, self.unity_p):
            if np.max(np.abs(np.abs(roots) - 1.0)) > _UNITY_TOLERANCE:
                raise InvariantViolation("cached roots of unity drifted off the unit circle")
        self.all_digits = ctx.digits(np.arange(self.size, dtype=np.int64))
        self.theta = euler_phi(self.order) / self.order
        logger.info(f"Character table ready for GF({ctx.q}^{ctx.n})")

    def trace_row(self, c: ElementLike) -> np.ndarray:
        """v with T(c*x) = v . coords(x) mod p"""
        coords = np.array(self.ctx._coerce(c).coeffs, dtype=np.int64)
        return (coords @ self.ctx.trace_form) % self.ctx.p

    def absolute_traces(self, c: ElementLike) -> np.ndarray:
        """T(c*x) for every encoding x"""
        return (self.all_digits @ self.trace_row(c)) % self.ctx.p

    @cached_property
    def ramanujan_weights(self) -> np.ndarray:
        """mu(t)/phi(t) at every index j, t = (q^n - 1)/gcd(j, q^n - 1) the order of eta_j"""
        weight_of: Dict[int, float] = {t: mobius(t) / euler_phi(t) for t in divisors(self.order)}
        orders = self.order // np.gcd(np.arange(self.order, dtype=np.int64), self.order)
        return np.array([weight_of[int(t)] for t in orders], dtype=np.float64)

    @cached_property
    def weighted_gauss_sums(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        For every encoding s: (G(eta_0, chi_s), sum over j != 0 of
        mu(t_j)/phi(t_j) * G(eta_j, chi_s)).
        """
        trivial = np.empty(self.size, dtype=np.complex128)
        weighted = np.empty(self.size, dtype=np.complex128)
        weights = self.ramanujan_weights[1:]
        for start in range(0, self.size, _ROW_BLOCK):
            rows = np.arange(start, min(start + _ROW_BLOCK, self.size), dtype=np.int64)
            sums = self._gauss_rows(rows)
            trivial[rows] = sums[:, 0]
            weighted[rows] = sums[:, 1:] @ weights
        return trivial, weighted

    def _gauss_rows(self, encodings: np.ndarray) -> np.ndarray:
        """G(eta_j, chi_s) for each s in ``encodings`` and every j, as rows"""
        row_vectors = (self.ctx.digits(encodings) @ self.ctx.trace_form) % self.ctx.p
        along_powers = (self.all_digits[self.exp] @ row_vectors.T) % self.ctx.p
        values = self.unity_p[along_powers.T]
        return self.order * np.fft.ifft(values, axis=1)


@lru_cache(maxsize=16)
def get_character_table(ctx: FieldContext) -> CharacterTable:
    return CharacterTable(ctx)


@dataclass(frozen=True)
class MultiplicativeCharacter:
    table: CharacterTable
    exponent: int
    order: int

    def __call__(self, x: ElementLike) -> complex:
        encoding = self.table.ctx.encode(x)
        if encoding == 0:
            return 0j
        k = int(self.table.dlog[encoding])
        return complex(self.table.unity[(self.exponent * k) % self.table.order])

    def values(self) -> np.ndarray:
        """Character values at every encoding, 0 at zero"""
        logs = self.table.dlog
        result = self.table.unity[(self.exponent * np.maximum(logs, 0)) % self.table.order]
        result[logs < 0] = 0
        return result


@dataclass(frozen=True)
class AdditiveCharacter:
    table: CharacterTable
    c: int
    row: Tuple[int, ...]

    def __call__(self, x: ElementLike) -> complex:
        coords = np.array(self.table.ctx._coerce(x).coeffs, dtype=np.int64)
        return complex(self.table.unity_p[int(coords @ np.array(self.row)) % self.table.ctx.p])

    def values(self) -> np.ndarray:
        traces = (self.table.all_digits @ np.array(self.row, dtype=np.int64)) % self.table.ctx.p
        return self.table.unity_p[traces]


def _units(t: int) -> List[int]:
    return [u for u in range(t) if math.gcd(u, t) == 1]


def mult_character(table: CharacterTable, t: int, index: int) -> MultiplicativeCharacter:
    """The index-th character of exact order t (0 <= index < phi(t))"""
    if t < 1 or table.order % t:
        raise NonDivisorError(f"{t} does not divide q^n - 1 = {table.order}")
    units = _units(t)
    if not 0 <= index < len(units):
        raise InputValidationError(f"character index {index} outside [0, {len(units)}) for order {t}")
    return MultiplicativeCharacter(table=table, exponent=units[index] * (table.order // t), order=t)


def characters_of_order(table: CharacterTable, t: int) -> List[MultiplicativeCharacter]:
    return [mult_character(table, t, i) for i in range(euler_phi(t))]


def add_character(table: CharacterTable, c: ElementLike) -> AdditiveCharacter:
    row = table.trace_row(c)
    return AdditiveCharacter(table=table, c=table.ctx.encode(c), row=tuple(int(v) for v in row))


def gauss_sum(table: CharacterTable, eta: MultiplicativeCharacter, c: ElementLike) -> ComplexValue:
    """Direct sum of eta(w) * chi_c(w) over every w"""
    return ComplexValue.from_complex(complex(np.sum(eta.values() * add_character(table, c).values())))


def batched_gauss_sums(table: CharacterTable, c: ElementLike) -> np.ndarray:
    """G(eta_j, chi_c) for every j at once, by one inverse FFT along the powers of g"""
    return table._gauss_rows(np.array([table.ctx.encode(c)], dtype=np.int64))[0]


def primitive_indicator_via_sum(table: CharacterTable, beta: ElementLike) -> float:
    """theta * sum over t | q^n - 1 of mu(t)/phi(t) times the sum of every eta of order t at beta"""
    encoding = table.ctx.encode(beta)
    if encoding == 0:
        return 0.0
    k = int(table.dlog[encoding])
    total = 0j
    for t in divisors(table.order):
        mu = mobius(t)
        if mu == 0:
            continue
        step = table.order // t
        exponents = (np.array(_units(t), dtype=np.int64) * step * k) % table.order
        total += mu / euler_phi(t) * np.sum(table.unity[exponents])
    return float(table.theta * total.real)


def primitive_indicator_values(table: CharacterTable) -> np.ndarray:
    """The same sum at every encoding, through one inverse FFT over j"""
    along_powers = table.theta * table.order * np.fft.ifft(table.ramanujan_weights).real
    result = np.zeros(table.size, dtype=np.float64)
    result[table.exp] = along_powers
    return result


def _trace_reference(table: CharacterTable, d: int, a: ElementLike):
    ctx = table.ctx
    if d == ctx.n:
        return ctx._coerce(a)
    spec = make_trace_spec(ctx, make_divisor_tuple(ctx.n, [d], allow_k1=True), [a])
    gamma = reference_element(ctx, spec)
    if gamma is None:
        raise InvariantViolation(f"no element of GF({ctx.q}^{ctx.n}) has trace {ctx.encode(a)} over GF({ctx.q}^{d})")
    return gamma


def trace_indicator_via_sum(table: CharacterTable, beta: ElementLike, d: int, a: ElementLike) -> float:
    """(1/q^d) * sum over c in GF(q^d) of chi_c(beta - gamma), with Tr_{n/d}(gamma) = a"""
    ctx = table.ctx
    if not ctx.in_subfield(a, d):
        raise InputValidationError(f"target {ctx.encode(a)} is not in GF({ctx.q}^{d})")
    gamma = _trace_reference(table, d, a)
    shift = np.array(ctx.sub(beta, gamma).coeffs, dtype=np.int64)
    subfield = ctx.subfield_encodings(d)
    traces = (ctx.digits(subfield) @ ctx.trace_form @ shift) % ctx.p
    return float(np.mean(table.unity_p[traces]).real)


def trace_indicator_values(table: CharacterTable, d: int, a: ElementLike) -> np.ndarray:
    """trace_indicator_via_sum at every encoding"""
    ctx = table.ctx
    gamma = _trace_reference(table, d, a)
    subfield = ctx.subfield_encodings(d)
    rows = (ctx.digits(subfield) @ ctx.trace_form) % ctx.p
    shifted = (table.all_digits - np.array(gamma.coeffs, dtype=np.int64)) % ctx.p
    return np.mean(table.unity_p[(rows @ shifted.T) % ctx.p], axis=0).real


def count_via_character_formula(table: CharacterTable, spec: TraceSpec) -> CharacterFormulaReport:
    """
    q^D * N / theta evaluated from the full expansion
    sum_c sum_t mu(t)/phi(t) sum_{eta of order t} chi_{s(c)}(-beta) G(eta, chi_{s(c)}),
    grouped by the value of s(c) = c_1 + ... + c_k.
    """
    ctx = table.ctx
    if spec.ctx is not ctx:
        raise InputValidationError("trace spec and character table belong to different fields")
    if not spec.admissible:
        raise InputValidationError("the character expansion needs admissible targets")
    divisor_tuple = spec.tuple
    if ctx.q ** divisor_tuple.D > settings.CHARSUM_CEILING:
        raise ResourceLimitError(f"q^D = {ctx.q}^{divisor_tuple.D} is above the character sum ceiling", limit=settings.CHARSUM_CEILING)

    beta = reference_element(ctx, spec)
    pools = [ctx.subfield_encodings(d) for d in divisor_tuple.entries]
    keys, multiplicity = sumset_distribution(ctx, pools)
    beta_row = (ctx.trace_form @ np.array(beta.coeffs, dtype=np.int64)) % ctx.p
    phases = table.unity_p[(-(ctx.digits(keys) @ beta_row)) % ctx.p]

    trivial, weighted = table.weighted_gauss_sums
    zero = keys == 0
    nonzero = ~zero
    zero_count = int(multiplicity[zero].sum())

    trivial_zero = float(zero_count * trivial[0].real)
    trivial_nonzero = complex(np.sum(multiplicity[nonzero] * phases[nonzero] * trivial[keys[nonzero]]))
    nontrivial_zero = complex(zero_count * weighted[0])
    s_term = complex(np.sum(multiplicity[nonzero] * phases[nonzero] * weighted[keys[nonzero]]))

    total = trivial_zero + trivial_nonzero + nontrivial_zero + s_term
    if abs(total.imag) > 1e-6 * max(1.0, abs(total)):
        logger.warning(f"character expansion has imaginary part {total.imag:.3g}")
    main_term = ctx.q ** (ctx.n + divisor_tuple.D - divisor_tuple.lambda_d)
    display_value = main_term + s_term.real
    report = CharacterFormulaReport(
        q=ctx.q,
        n=ctx.n,
        d=list(divisor_tuple.entries),
        theta=table.theta,
        total=total.real,
        count=table.theta * total.real / ctx.q ** divisor_tuple.D,
        main_term=main_term,
        s_term=ComplexValue.from_complex(s_term),
        trivial_character_zero_sum=trivial_zero,
        trivial_character_nonzero_sum=ComplexValue.from_complex(trivial_nonzero),
        nontrivial_character_zero_sum=ComplexValue.from_complex(nontrivial_zero),
        display_value=display_value,
        residual=total.real - display_value,
    )
    logger.debug(f"character count for {divisor_tuple.describe()}: {report.count:.6f}, residual {report.residual:.6g}")
    return report


def s_term_bound_check(table: CharacterTable, spec: TraceSpec) -> SBoundReport:
    """|S| against q^(n/2 + D) * W(q^n - 1), compared in squares"""
    ctx = table.ctx
    report = count_via_character_formula(table, spec)
    w = squarefree_divisor_count(ctx.order_factorization)
    s_abs = abs(report.s_term)
    exponent2 = ctx.n + 2 * spec.tuple.D
    return SBoundReport(
        q=ctx.q,
        n=ctx.n,
        d=report.d,
        s_abs=s_abs,
        bound=math.sqrt(ctx.q ** exponent2) * w,
        w_value=w,
        main_term=report.main_term,
        holds=s_abs * s_abs < ctx.q ** exponent2 * w * w,
    )


# Verification suite
def _row(row_id: str, passed: bool, q: int, n: int, lhs: float, rhs: float, verdict: str, **details) -> ReportRow:
    row = ReportRow(row_id=row_id, suite="charsum", passed=passed, q=q, n=n, lhs=lhs, rhs=rhs, verdict=verdict, details=details)
    logger.debug(row.to_line())
    return row


def _check_gauss_magnitudes(table: CharacterTable) -> ReportRow:
    ctx = table.ctx
    target = math.sqrt(ctx.size)
    worst = 0.0
    for start in range(1, ctx.size, _ROW_BLOCK):
        rows = np.arange(start, min(start + _ROW_BLOCK, ctx.size), dtype=np.int64)
        sums = table._gauss_rows(rows)[:, 1:]
        worst = max(worst, float(np.max(np.abs(np.abs(sums) - target))))
    return _row(
        f"gauss-q{ctx.q}-n{ctx.n}", worst <= 1e-6 * target, ctx.q, ctx.n, worst, 1e-6 * target,
        "max ||G| - q^(n/2)|",
    )


def _check_orthogonality(table: CharacterTable) -> ReportRow:
    ctx = table.ctx
    worst = 0.0
    for t in divisors(table.order)[1:]:
        worst = max(worst, abs(complex(np.sum(mult_character(table, t, 0).values()))))
    for c in range(1, ctx.size):
        worst = max(worst, abs(complex(np.sum(table.unity_p[table.absolute_traces(c)]))))
    tolerance = 1e-8 * ctx.size
    return _row(f"orthogonality-q{ctx.q}-n{ctx.n}", worst <= tolerance, ctx.q, ctx.n, worst, tolerance, "max |character sum|")


def _check_primitive_indicator(table: CharacterTable) -> ReportRow:
    ctx = table.ctx
    expected = primitive_mask(ctx).astype(np.float64)
    worst = float(np.max(np.abs(primitive_indicator_values(table) - expected)))
    return _row(f"primitive-indicator-q{ctx.q}-n{ctx.n}", worst <= 1e-6, ctx.q, ctx.n, worst, 1e-6, "max |indicator error|")


def _check_trace_indicator(table: CharacterTable) -> ReportRow:
    ctx = table.ctx
    worst = 0.0
    every = np.arange(ctx.size, dtype=np.int64)
    for d in divisors(ctx.n):
        traces = ctx.trace_encodings(d, every)
        for a in ctx.subfield_encodings(d).tolist():
            expected = (traces == a).astype(np.float64)
            worst = max(worst, float(np.max(np.abs(trace_indicator_values(table, d, a) - expected))))
    return _row(f"trace-indicator-q{ctx.q}-n{ctx.n}", worst <= 1e-6, ctx.q, ctx.n, worst, 1e-6, "max |indicator error|")


def _check_formula(table: CharacterTable) -> List[ReportRow]:
    ctx = table.ctx
    rows = []
    for divisor_tuple in all_divisor_tuples(ctx.n):
        if ctx.q ** divisor_tuple.D > settings.CHARSUM_CEILING:
            continue
        for targets in admissible_targets(ctx, divisor_tuple):
            spec = make_trace_spec(ctx, divisor_tuple, targets)
            report = count_via_character_formula(table, spec)
            exact = count_primitive_with_traces(ctx, spec)
            all_zero = not any(targets)
            expected_residual = -float(ctx.q ** divisor_tuple.D) if all_zero else 0.0
            bound = s_term_bound_check(table, spec)
            passed = (
                abs(report.count - exact) <= 1e-3
                and abs(report.residual - expected_residual) <= 1e-6 * ctx.q ** (ctx.n + divisor_tuple.D)
                and bound.holds
            )
            rows.append(_row(
                f"formula-q{ctx.q}-n{ctx.n}-d{divisor_tuple.describe()}-a{list(targets)}", passed, ctx.q, ctx.n,
                report.count, exact, "character count vs exhaustive",
                residual=report.residual, expected_residual=expected_residual, s_abs=bound.s_abs, s_bound=bound.bound,
            ))
    return rows


def verify_charsum_identities(limit: int = 2 ** 6, formula_limit: Optional[int] = None) -> SuiteReport:
    """
    Gauss sum magnitudes, orthogonality, both indicator identities and the
    full character expansion against exhaustive counts, over every GF(q^n)
    with 2 <= n and q^n <= limit. The character expansion rows run over
    every field up to ``formula_limit``, which may exceed ``limit``.
    """
    formula_limit = limit if formula_limit is None else formula_limit
    outer = max(limit, formula_limit)
    report = SuiteReport(suite="charsum")
    q = 2
    while q * q <= outer:
        try:
            contexts = []
            n = 2
            while q ** n <= outer:
                contexts.append(get_context(q, n))
                n += 1
        except InputValidationError:
            q += 1
            continue
        for ctx in contexts:
            table = get_character_table(ctx)
            if ctx.size <= limit:
                report.rows.append(_check_gauss_magnitudes(table))
                report.rows.append(_check_orthogonality(table))
                report.rows.append(_check_primitive_indicator(table))
                report.rows.append(_check_trace_indicator(table))
            if ctx.size <= formula_limit:
                report.rows.extend(_check_formula(table))
        q += 1
    logger.info(f"charsum: {len(report.failures)} failures out of {len(report.rows)} rows")
    return report
