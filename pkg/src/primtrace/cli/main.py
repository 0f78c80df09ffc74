"""
primtrace command line
Subcommands: check, count, find, verify-paper.

Exit codes: 0 decisive success, 2 inconclusive, 1 error or a failed
verification row.
"""

import argparse
import logging
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from ..core.config import settings
from ..core.exceptions import InputValidationError, InvariantViolation, PrimtraceError
from ..core.models import (
    CommandReport,
    ExistenceVerdict,
    FindStrategyEnum,
    SuiteReport,
    VerdictStatusEnum,
    VerifyScopeEnum,
)
from ..services.charsum_service import verify_charsum_identities
from ..services.existence_service import (
    decide,
    known_exception,
    order_factorization,
    verify_cohen,
    verify_exception_family,
    verify_small_cases,
    verify_table1,
)
from ..services.field_service import get_context, split_prime_power
from ..services.numtheory_service import w_bounds
from ..services.search_service import count_primitive_with_traces, find_witness, revalidate_witness
from ..services.trace_service import count_with_traces, make_divisor_tuple, make_trace_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

# Gauss sum and indicator checks run over every field up to this size
CHARSUM_IDENTITY_LIMIT = 2 ** 10


def parse_int_list(text: str, name: str) -> List[int]:
    """Comma-separated integers; the offending token is named on failure"""
    values = []
    for token in text.split(","):
        token = token.strip()
        try:
            values.append(int(token))
        except ValueError:
            raise InputValidationError(f"--{name}: '{token}' is not an integer")
    return values


def _record(command: str, q: int, n: int, divisor_tuple, **fields: Any) -> Dict[str, Any]:
    record = {
        "command": command,
        "q": q,
        "n": n,
        "d": list(divisor_tuple.entries),
        "lambda": divisor_tuple.lambda_d,
        "lcm": divisor_tuple.lcm_value,
        "lhs": None,
        "rhs": None,
        "verdict": None,
        "reason": None,
        "witness": None,
    }
    record.update(fields)
    return record


def _w_line(q: int, n: int, budget: Optional[int]) -> str:
    factorization = order_factorization(q, n, budget, partial=True)
    lower, upper = w_bounds(factorization)
    if factorization.complete:
        return f"W(q^n-1) = {lower} (omega = {factorization.omega})"
    return f"{lower} <= W(q^n-1) <= {upper} (unfactored cofactor {factorization.cofactor})"


def _verdict_status(verdict: ExistenceVerdict) -> int:
    return EXIT_OK if verdict.decisive else EXIT_INCONCLUSIVE


def cmd_check(q: int, n: int, d: Sequence[int], targets: Optional[Sequence[int]] = None, allow_k1: bool = False, budget: Optional[int] = None) -> CommandReport:
    """Run the verdict chain for (q, n, d), with the exception catalogue when targets are given"""
    split_prime_power(q)
    divisor_tuple = make_divisor_tuple(n, d, allow_k1=allow_k1)
    spec = None
    if targets is not None:
        ctx = get_context(q, n)
        spec = make_trace_spec(ctx, divisor_tuple, targets)
    verdict = decide(q, n, divisor_tuple, spec, budget)

    lines = [
        f"q={q} n={n} d={divisor_tuple.describe()}",
        f"lambda(d) = {divisor_tuple.lambda_d}",
        f"lcm(d) = {divisor_tuple.lcm_value}",
        _w_line(q, n, budget),
    ]
    for step in verdict.evidence.get("chain", []):
        lines.append(f"{step['reason']}: lhs={step['lhs']} rhs={step['rhs']} -> {step['status']}")
    lhs, rhs = verdict.evidence.get("lhs"), verdict.evidence.get("rhs")
    lines.append(f"verdict: {verdict.status.value} ({verdict.reason.value})")
    if "witness" in verdict.evidence:
        lines.append(f"exception: {verdict.evidence['witness']}")

    return CommandReport(
        command="check",
        inputs={"q": q, "n": n, "d": list(d), "a": list(targets) if targets is not None else None, "allow_k1": allow_k1, "budget": budget},
        verdicts=[verdict.model_dump(mode="json")],
        records=[_record("check", q, n, divisor_tuple, lhs=lhs, rhs=rhs, verdict=verdict.status.value, reason=verdict.reason.value)],
        lines=lines,
        status=_verdict_status(verdict),
    )


def cmd_count(q: int, n: int, d: Sequence[int], targets: Sequence[int], allow_k1: bool = False) -> CommandReport:
    """Fiber size against q^(n - lambda), and the primitive elements inside the fiber"""
    ctx = get_context(q, n)
    divisor_tuple = make_divisor_tuple(n, d, allow_k1=allow_k1)
    spec = make_trace_spec(ctx, divisor_tuple, targets)
    fiber = count_with_traces(ctx, spec)
    predicted = q ** (n - divisor_tuple.lambda_d) if spec.admissible else 0
    if fiber != predicted:
        raise InvariantViolation(f"fiber has {fiber} elements, expected {predicted}")
    primitive = count_primitive_with_traces(ctx, spec)

    lines = [
        f"field: {ctx.descriptor()}",
        f"d={divisor_tuple.describe()} a={list(spec.target_encodings)} admissible={spec.admissible}",
        f"fiber = {fiber}, predicted q^(n-lambda) = {predicted}",
        f"primitive in fiber N(n,d,a) = {primitive}",
    ]
    return CommandReport(
        command="count",
        inputs={"q": q, "n": n, "d": list(d), "a": list(targets), "allow_k1": allow_k1, "field": ctx.descriptor()},
        verdicts=[{"admissible": spec.admissible, "fiber": fiber, "predicted": predicted, "primitive": primitive}],
        records=[_record(
            "count", q, n, divisor_tuple, lhs=fiber, rhs=predicted,
            verdict="admissible" if spec.admissible else "not_admissible", reason=f"primitive={primitive}",
        )],
        lines=lines,
        status=EXIT_OK,
    )


def cmd_find(q: int, n: int, d: Sequence[int], targets: Sequence[int], strategy: str = FindStrategyEnum.EXHAUSTIVE.value, allow_k1: bool = False) -> CommandReport:
    """First primitive element with the prescribed traces, re-validated before it is reported"""
    ctx = get_context(q, n)
    divisor_tuple = make_divisor_tuple(n, d, allow_k1=allow_k1)
    spec = make_trace_spec(ctx, divisor_tuple, targets)
    witness = find_witness(ctx, spec, strategy)

    lines = [f"field: {ctx.descriptor()}", f"d={divisor_tuple.describe()} a={list(spec.target_encodings)} strategy={strategy}"]
    witnesses: List[int] = []
    if witness is None:
        verdict = "none_exists"
        lines.append("none exists: no primitive element carries these traces")
        exception = known_exception(ctx, spec)
        if exception is not None:
            lines.append(f"known exception: {exception.evidence['witness']}")
    else:
        if not revalidate_witness(ctx, spec, witness):
            raise InvariantViolation(f"witness {ctx.encode(witness)} failed re-validation")
        verdict = "found"
        witnesses.append(ctx.encode(witness))
        lines.append(f"witness: {witnesses[0]} (coefficients {list(witness.coeffs)})")

    return CommandReport(
        command="find",
        inputs={"q": q, "n": n, "d": list(d), "a": list(targets), "strategy": strategy, "field": ctx.descriptor()},
        verdicts=[{"result": verdict}],
        witnesses=witnesses,
        records=[_record("find", q, n, divisor_tuple, verdict=verdict, reason=strategy, witness=witnesses[0] if witnesses else None)],
        lines=lines,
        status=EXIT_OK,
    )


def _run_suite(scope: VerifyScopeEnum, budget: Optional[int], full_sweep: bool = False) -> SuiteReport:
    if scope == VerifyScopeEnum.TABLE1:
        return verify_table1()
    if scope == VerifyScopeEnum.SMALL_CASES:
        return verify_small_cases(budget, full_sweep=full_sweep)
    if scope == VerifyScopeEnum.COHEN:
        return verify_cohen()
    if scope == VerifyScopeEnum.EXCEPTIONS:
        return verify_exception_family()
    return verify_charsum_identities(limit=CHARSUM_IDENTITY_LIMIT, formula_limit=settings.CHARSUM_CEILING)


def cmd_verify_paper(scope: str = VerifyScopeEnum.ALL.value, budget: Optional[int] = None, full_sweep: bool = False) -> CommandReport:
    scope = VerifyScopeEnum(scope)
    suites = [s for s in VerifyScopeEnum if s != VerifyScopeEnum.ALL] if scope == VerifyScopeEnum.ALL else [scope]
    lines: List[str] = []
    records: List[Dict[str, Any]] = []
    summaries = []
    for suite in suites:
        logger.info(f"Running {suite.value} suite")
        report = _run_suite(suite, budget, full_sweep)
        lines.extend(row.to_line() for row in report.rows)
        records.extend({"suite": report.suite, **row.to_record()} for row in report.rows)
        summaries.append({"suite": report.suite, "rows": len(report.rows), "failures": len(report.failures)})
        lines.append(f"== {report.suite}: {len(report.rows) - len(report.failures)}/{len(report.rows)} passed")
    failed = any(summary["failures"] for summary in summaries)
    return CommandReport(
        command="verify-paper",
        inputs={"scope": scope.value, "budget": budget, "full_sweep": full_sweep},
        verdicts=summaries,
        records=records,
        lines=lines,
        status=EXIT_ERROR if failed else EXIT_OK,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primtrace", description="Primitive elements with prescribed traces")
    parser.add_argument("--json", action="store_true", help="Structured output")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def field_args(sub: argparse.ArgumentParser, targets: bool) -> None:
        sub.add_argument("--q", type=int, required=True, help="Prime power q")
        sub.add_argument("--n", type=int, required=True, help="Extension degree n")
        sub.add_argument("--d", type=str, required=True, help="Comma-separated divisors d_1,...,d_k")
        sub.add_argument("--a", type=str, required=targets, default=None, help="Comma-separated target encodings")
        sub.add_argument("--allow-k1", action="store_true", help="Accept a single prescribed trace")

    check = subparsers.add_parser("check", help="Run the existence criteria")
    field_args(check, targets=False)
    check.add_argument("--budget", type=int, default=None, help="Pollard-rho iterations per factor")

    count = subparsers.add_parser("count", help="Exhaustive fiber and primitive counts")
    field_args(count, targets=True)

    find = subparsers.add_parser("find", help="Search for a primitive witness")
    field_args(find, targets=True)
    find.add_argument("--strategy", choices=[s.value for s in FindStrategyEnum], default=FindStrategyEnum.EXHAUSTIVE.value)

    verify = subparsers.add_parser("verify-paper", help="Run the verification suites")
    verify.add_argument("--scope", choices=[s.value for s in VerifyScopeEnum], default=VerifyScopeEnum.ALL.value)
    verify.add_argument("--budget", type=int, default=None, help="Pollard-rho iterations per factor")
    verify.add_argument("--full-sweep", action="store_true", help="Check every triple left out of the range table")
    return parser


def run(args: argparse.Namespace) -> CommandReport:
    started = time.perf_counter()
    if args.command == "verify-paper":
        report = cmd_verify_paper(args.scope, args.budget, args.full_sweep)
    else:
        d = parse_int_list(args.d, "d")
        targets = parse_int_list(args.a, "a") if args.a is not None else None
        if args.command == "check":
            report = cmd_check(args.q, args.n, d, targets, args.allow_k1, args.budget)
        elif args.command == "count":
            report = cmd_count(args.q, args.n, d, targets, args.allow_k1)
        else:
            report = cmd_find(args.q, args.n, d, targets, args.strategy, args.allow_k1)
    report.timing = time.perf_counter() - started
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose or settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    try:
        report = run(args)
    except PrimtraceError as e:
        logger.error(f"{args.command} failed: {e.message}")
        print(f"error [{e.code}]: {e.message}", file=sys.stderr)
        return EXIT_ERROR

    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        for line in report.lines:
            print(line)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
