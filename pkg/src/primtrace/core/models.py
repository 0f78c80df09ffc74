import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Number = Union[int, float]

# Ceilings for c_{t,a}: a=4 depends on the parity of t
C_CEILING_EVEN_4 = 4.9
C_CEILING_ODD_4 = 2.9
C_CEILING_8 = 4514.7


class VerdictStatusEnum(str, Enum):
    EXISTS = "exists"
    INCONCLUSIVE = "inconclusive"
    KNOWN_EXCEPTION = "known_exception"


class VerdictReasonEnum(str, Enum):
    MAIN_INEQUALITY = "main_inequality"
    LCM_CRITERION = "lcm_criterion"
    COP_CASE_A = "cop_case_a"
    COP_CASE_B1 = "cop_case_b1"
    COP_CASE_B2 = "cop_case_b2"
    COP_CASE_B3 = "cop_case_b3"
    COHEN_THEOREM = "cohen_theorem"
    COHEN_EXCEPTION = "cohen_exception"
    D1_EQUALS_TWO_FAMILY = "d1_equals_two_family"
    NONE_APPLICABLE = "none_applicable"


class WModeEnum(str, Enum):
    EXACT_W = "exact_W"
    LOGLOG_BOUND = "loglog_bound"
    C_CONSTANT_BOUND = "c_constant_bound"
    PARTIAL_FACTORIZATION = "partial_factorization"


class FindStrategyEnum(str, Enum):
    EXHAUSTIVE = "exhaustive"
    LIFT = "lift"


class VerifyScopeEnum(str, Enum):
    ALL = "all"
    TABLE1 = "table1"
    SMALL_CASES = "small_cases"
    COHEN = "cohen"
    EXCEPTIONS = "exceptions"
    CHARSUM = "charsum"


# Arithmetic models
class Factorization(BaseModel):
    """Prime factorization of ``value``; ``cofactor`` is the unfactored part when incomplete"""

    model_config = ConfigDict(frozen=True)

    value: int = Field(..., ge=1)
    factors: Tuple[Tuple[int, int], ...] = ()
    complete: bool = True
    cofactor: int = 1
    # every prime dividing ``cofactor`` is >= prime_floor
    prime_floor: int = 2

    @property
    def primes(self) -> List[int]:
        return [prime for prime, _ in self.factors]

    @property
    def omega(self) -> int:
        return len(self.factors)

    def product(self) -> int:
        result = self.cofactor
        for prime, exponent in self.factors:
            result *= prime ** exponent
        return result


class DivisorTuple(BaseModel):
    """A validated element of Lambda_k(n) with its derived quantities"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    entries: Tuple[int, ...]
    k: int
    D: int
    lambda_d: int
    lcm_value: int

    def describe(self) -> str:
        return "(" + ",".join(str(d) for d in self.entries) + ")"


class ComplexValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    re: float
    im: float

    @model_validator(mode="after")
    def _finite(self) -> "ComplexValue":
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("complex value must be finite")
        return self

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        return cls(re=float(value.real), im=float(value.imag))

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)


# Existence models
class BoundParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: int = Field(..., ge=3)
    c_value: float = Field(..., gt=0)
    w_mode: WModeEnum = WModeEnum.C_CONSTANT_BOUND
    # parity of q^n - 1; unknown parity falls back to the looser a=4 ceiling
    t_even: Optional[bool] = None

    @model_validator(mode="after")
    def _check_a(self) -> "BoundParams":
        if self.w_mode != WModeEnum.C_CONSTANT_BOUND:
            return self
        if self.a not in (4, 8):
            raise ValueError("the c-constant bound is only used with a in {4, 8}")
        if self.a == 8:
            ceiling = C_CEILING_8
        else:
            ceiling = C_CEILING_ODD_4 if self.t_even is False else C_CEILING_EVEN_4
        if self.c_value > ceiling:
            raise ValueError(f"c = {self.c_value} exceeds the ceiling {ceiling} for a={self.a}")
        return self


class ExistenceVerdict(BaseModel):
    status: VerdictStatusEnum
    reason: VerdictReasonEnum
    evidence: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_evidence(self) -> "ExistenceVerdict":
        if self.status == VerdictStatusEnum.EXISTS:
            if self.reason == VerdictReasonEnum.NONE_APPLICABLE:
                raise ValueError("an Exists verdict needs a decisive reason")
            if "lhs" not in self.evidence or "rhs" not in self.evidence:
                raise ValueError("an Exists verdict must record both inequality sides")
        if self.status == VerdictStatusEnum.KNOWN_EXCEPTION and "witness" not in self.evidence:
            raise ValueError("a KnownException verdict must carry a witness description")
        return self

    @property
    def decisive(self) -> bool:
        return self.status != VerdictStatusEnum.INCONCLUSIVE


# Report models
class ReportRow(BaseModel):
    row_id: str
    suite: str
    q: Optional[int] = None
    n: Optional[int] = None
    d: List[int] = Field(default_factory=list)
    a_param: Optional[int] = None
    lhs: Optional[Number] = None
    rhs: Optional[Number] = None
    verdict: str
    reason: str = ""
    passed: bool
    details: Dict[str, Any] = Field(default_factory=dict)

    def inputs_text(self) -> str:
        parts = []
        if self.q is not None:
            parts.append(f"q={self.q}")
        if self.n is not None:
            parts.append(f"n={self.n}")
        if self.d:
            parts.append("d=(" + ",".join(str(x) for x in self.d) + ")")
        if self.a_param is not None:
            parts.append(f"a={self.a_param}")
        return " ".join(parts)

    def to_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.row_id} | {self.inputs_text()} | {_fmt(self.lhs)} | {_fmt(self.rhs)} | {self.verdict} [{status}]"

    def to_record(self) -> Dict[str, Any]:
        record = self.model_dump(include={"q", "n", "d", "a_param", "lhs", "rhs", "verdict", "reason"})
        record["row_id"] = self.row_id
        record["passed"] = self.passed
        return record


class SuiteReport(BaseModel):
    suite: str
    rows: List[ReportRow] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> List[ReportRow]:
        return [row for row in self.rows if not row.passed]


class CharacterFormulaReport(BaseModel):
    """Decomposition of q^D * N / theta evaluated from the full character expansion"""

    q: int
    n: int
    d: List[int]
    theta: float
    total: float
    count: float
    main_term: int
    s_term: ComplexValue
    trivial_character_zero_sum: float
    trivial_character_nonzero_sum: ComplexValue
    nontrivial_character_zero_sum: ComplexValue
    display_value: float
    residual: float


class SBoundReport(BaseModel):
    q: int
    n: int
    d: List[int]
    s_abs: float
    bound: float
    w_value: int
    main_term: int
    holds: bool


class CommandReport(BaseModel):
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    verdicts: List[Dict[str, Any]] = Field(default_factory=list)
    witnesses: List[int] = Field(default_factory=list)
    records: List[Dict[str, Any]] = Field(default_factory=list)
    lines: List[str] = Field(default_factory=list)
    timing: float = 0.0
    status: int = 0


def _fmt(value: Optional[Number]) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
