"""
Field Service
Explicit GF(p^m), m = s*n, in polynomial basis, viewed as the degree-n
extension of GF(q) with q = p^s.

Single-element operations work on exact Python integers. Bulk operations
(whole-field sweeps, subfields, discrete-log tables) go through the
GF(p)-linear matrices of Frobenius, trace and multiplication maps with numpy.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.config import settings
from ..core.exceptions import (
    DomainError,
    ElementEncodingError,
    InputValidationError,
    InvariantViolation,
    NonDivisorError,
    NotPrimeError,
    NotPrimePowerError,
    ResourceLimitError,
)
from ..core.models import Factorization
from .numtheory_service import factorize, factorize_power_minus_one, is_probable_prime
from .polynomial_service import poly_mulmod, poly_powmod, poly_rem, poly_strip, smallest_irreducible

logger = logging.getLogger(__name__)

# encodings of bulk paths live in int64
_BULK_LIMIT = 2 ** 62
_CHUNK = 2 ** 16


@dataclass(frozen=True)
class FieldElement:
    """Polynomial-basis coordinates; coeffs[i] is the coefficient of x^i"""

    coeffs: Tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)


ElementLike = Union[FieldElement, int]


def nullspace_mod_p(matrix: Sequence[Sequence[int]], p: int) -> List[List[int]]:
    """Basis of the right kernel of ``matrix`` over GF(p), by Gauss-Jordan elimination"""
    rows = [[int(v) % p for v in row] for row in matrix]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [(vi - factor * vr) % p for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    basis = []
    for free in (c for c in range(n_cols) if c not in pivots):
        vector = [0] * n_cols
        vector[free] = 1
        for i, c in enumerate(pivots):
            vector[c] = (-rows[i][free]) % p
        basis.append(vector)
    return basis


class FieldContext:
    """GF(q^n) with q = p^s, immutable after construction"""

    def __init__(self, p: int, s: int, n: int, table_ceiling: Optional[int] = None):
        self.p = p
        self.s = s
        self.n = n
        self.m = s * n
        self.q = p ** s
        self.size = p ** self.m
        self.order = self.size - 1
        self.defining_poly: Tuple[int, ...] = tuple(smallest_irreducible(p, self.m))
        self.order_factorization: Factorization = factorize_power_minus_one(p, self.m)
        self.table_ceiling = settings.TABLE_CEILING if table_ceiling is None else table_ceiling
        self._subfields: Dict[int, np.ndarray] = {}
        self._frobenius_powers: Dict[int, np.ndarray] = {}
        self._trace_matrices: Dict[Tuple[int, int], np.ndarray] = {}

        self.generator: Optional[FieldElement] = None
        if self.size <= self.table_ceiling:
            self.generator = self._find_generator()

        logger.info(f"Built GF({self.q}^{self.n}) = GF({p}^{self.m}) with defining polynomial {self.describe_poly()}")

    # Encoding
    def describe_poly(self) -> str:
        return ",".join(str(c) for c in self.defining_poly)

    def descriptor(self) -> str:
        """Context descriptor: p,s,n followed by the defining polynomial, constant term first"""
        return f"{self.p},{self.s},{self.n};{self.describe_poly()}"

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        values = tuple(int(c) for c in coeffs)
        if len(values) != self.m or any(c < 0 or c >= self.p for c in values):
            raise ElementEncodingError(f"coefficient vector {list(coeffs)} is not an element of GF({self.p}^{self.m})")
        return FieldElement(values)

    def decode(self, encoding: int) -> FieldElement:
        encoding = int(encoding)
        if encoding < 0 or encoding >= self.size:
            raise ElementEncodingError(f"encoding {encoding} outside [0, {self.size})")
        coeffs = []
        for _ in range(self.m):
            encoding, r = divmod(encoding, self.p)
            coeffs.append(r)
        return FieldElement(tuple(coeffs))

    def encode(self, x: ElementLike) -> int:
        x = self._coerce(x)
        result = 0
        for c in reversed(x.coeffs):
            result = result * self.p + c
        return result

    def _coerce(self, x: ElementLike) -> FieldElement:
        if isinstance(x, FieldElement):
            if len(x.coeffs) != self.m:
                raise ElementEncodingError(f"element of length {len(x.coeffs)} does not belong to GF({self.p}^{self.m})")
            return x
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return self.decode(int(x))
        raise ElementEncodingError(f"cannot interpret {x!r} as a field element")

    def _to_poly(self, x: FieldElement) -> List[int]:
        return poly_strip(x.coeffs)

    def _from_poly(self, poly: Sequence[int]) -> FieldElement:
        coeffs = list(poly) + [0] * (self.m - len(poly))
        return FieldElement(tuple(coeffs))

    def zero(self) -> FieldElement:
        return FieldElement((0,) * self.m)

    def one(self) -> FieldElement:
        return FieldElement((1,) + (0,) * (self.m - 1))

    def variable(self) -> FieldElement:
        """The class of x modulo the defining polynomial"""
        return self._from_poly(poly_rem([0, 1], self.defining_poly, self.p))

    # Arithmetic
    def add(self, x: ElementLike, y: ElementLike) -> FieldElement:
        x, y = self._coerce(x), self._coerce(y)
        return FieldElement(tuple((a + b) % self.p for a, b in zip(x.coeffs, y.coeffs)))

    def sub(self, x: ElementLike, y: ElementLike) -> FieldElement:
        x, y = self._coerce(x), self._coerce(y)
        return FieldElement(tuple((a - b) % self.p for a, b in zip(x.coeffs, y.coeffs)))

    def neg(self, x: ElementLike) -> FieldElement:
        x = self._coerce(x)
        return FieldElement(tuple((-a) % self.p for a in x.coeffs))

    def mul(self, x: ElementLike, y: ElementLike) -> FieldElement:
        x, y = self._coerce(x), self._coerce(y)
        return self._from_poly(poly_mulmod(self._to_poly(x), self._to_poly(y), self.defining_poly, self.p))

    def pow(self, x: ElementLike, e: int) -> FieldElement:
        x = self._coerce(x)
        if x.is_zero:
            if e > 0:
                return self.zero()
            if e == 0:
                return self.one()
            raise DomainError("zero has no negative powers")
        e %= self.order
        return self._from_poly(poly_powmod(self._to_poly(x), e, self.defining_poly, self.p))

    def inv(self, x: ElementLike) -> FieldElement:
        x = self._coerce(x)
        if x.is_zero:
            raise DomainError("zero is not invertible")
        return self.pow(x, self.order - 1)

    def frobenius(self, x: ElementLike, j: int) -> FieldElement:
        """x^(q^j)"""
        if j < 0:
            raise InputValidationError(f"Frobenius power must be nonnegative, got {j}")
        return self.pow(x, self.q ** (j % self.n))

    def _check_divisor(self, d: int) -> None:
        if not isinstance(d, (int, np.integer)) or d < 1 or self.n % d:
            raise NonDivisorError(f"{d} does not divide n={self.n}")

    def relative_trace(self, x: ElementLike, d: int, e: int) -> FieldElement:
        """Sum of x^(q^(e*t)) for t < d/e, the trace from GF(q^d) down to GF(q^e)"""
        self._check_divisor(d)
        if e < 1 or d % e:
            raise NonDivisorError(f"{e} does not divide {d}")
        result = self.zero()
        y = self._coerce(x)
        for _ in range(d // e):
            result = self.add(result, y)
            y = self.frobenius(y, e)
        return result

    def trace(self, x: ElementLike, d: int) -> FieldElement:
        """Tr_{n/d}(x), landing in GF(q^d)"""
        return self.relative_trace(x, self.n, d)

    def in_subfield(self, x: ElementLike, d: int) -> bool:
        self._check_divisor(d)
        x = self._coerce(x)
        return self.frobenius(x, d) == x

    def is_primitive(self, x: ElementLike) -> bool:
        x = self._coerce(x)
        if x.is_zero:
            return False
        one = self.one()
        return all(self.pow(x, self.order // r) != one for r in self.order_factorization.primes)

    def enumerate(self, ceiling: Optional[int] = None) -> Iterator[FieldElement]:
        """All elements in increasing encoding order"""
        ceiling = settings.ENUMERATION_CEILING if ceiling is None else ceiling
        if self.size > ceiling:
            raise ResourceLimitError(f"GF({self.p}^{self.m}) has {self.size} elements, above the enumeration ceiling", limit=ceiling)
        for encoding in range(self.size):
            yield self.decode(encoding)

    def _find_generator(self) -> FieldElement:
        for encoding in range(1, self.size):
            candidate = self.decode(encoding)
            if self.is_primitive(candidate):
                logger.debug(f"generator of GF({self.p}^{self.m}): encoding {encoding}")
                return candidate
        raise InvariantViolation(f"no primitive element found in GF({self.p}^{self.m})")

    # Bulk paths
    def _require_bulk(self) -> None:
        if self.size > _BULK_LIMIT:
            raise ResourceLimitError(f"GF({self.p}^{self.m}) is too large for vectorized sweeps", limit=_BULK_LIMIT)

    @cached_property
    def _powers(self) -> np.ndarray:
        self._require_bulk()
        return np.array([self.p ** i for i in range(self.m)], dtype=np.int64)

    def digits(self, encodings) -> np.ndarray:
        """Rows of coordinates for an array of encodings"""
        enc = np.asarray(encodings, dtype=np.int64)
        return (enc[:, None] // self._powers[None, :]) % self.p

    def from_digits(self, digits: np.ndarray) -> np.ndarray:
        return digits.astype(np.int64) @ self._powers

    def _column_matrix(self, columns: List[FieldElement]) -> np.ndarray:
        return np.array([x.coeffs for x in columns], dtype=np.int64).T

    def _matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a @ b) % self.p

    @cached_property
    def frobenius_matrix_p(self) -> np.ndarray:
        """Matrix of y -> y^p; column i holds the coordinates of x^(p*i)"""
        xp = poly_powmod([0, 1], self.p, self.defining_poly, self.p)
        columns = []
        current: List[int] = [1]
        for _ in range(self.m):
            columns.append(self._from_poly(current))
            current = poly_mulmod(current, xp, self.defining_poly, self.p)
        return self._column_matrix(columns)

    def _matrix_power(self, matrix: np.ndarray, e: int) -> np.ndarray:
        result = np.eye(self.m, dtype=np.int64)
        base = matrix.copy()
        while e:
            if e & 1:
                result = self._matmul(result, base)
            e >>= 1
            if e:
                base = self._matmul(base, base)
        return result

    def frobenius_matrix(self, j: int = 1) -> np.ndarray:
        """Matrix of y -> y^(q^j)"""
        j %= self.n
        if j not in self._frobenius_powers:
            self._frobenius_powers[j] = self._matrix_power(self.frobenius_matrix_p, self.s * j)
        return self._frobenius_powers[j]

    def relative_trace_matrix(self, d: int, e: int) -> np.ndarray:
        """Matrix of the GF(q^d) -> GF(q^e) trace sum, applied to all of GF(q^n)"""
        self._check_divisor(d)
        if e < 1 or d % e:
            raise NonDivisorError(f"{e} does not divide {d}")
        key = (d, e)
        if key not in self._trace_matrices:
            total = np.zeros((self.m, self.m), dtype=np.int64)
            for t in range(d // e):
                total = (total + self.frobenius_matrix(e * t)) % self.p
            self._trace_matrices[key] = total
        return self._trace_matrices[key]

    def trace_matrix(self, d: int) -> np.ndarray:
        return self.relative_trace_matrix(self.n, d)

    def multiplication_matrix(self, c: ElementLike) -> np.ndarray:
        """Matrix of y -> c*y"""
        c = self._coerce(c)
        columns = []
        basis_poly: List[int] = [1]
        for _ in range(self.m):
            columns.append(self.mul(c, self._from_poly(basis_poly)))
            basis_poly = poly_rem([0] + basis_poly, self.defining_poly, self.p)
        return self._column_matrix(columns)

    @cached_property
    def absolute_trace_functional(self) -> np.ndarray:
        """Row vector v with T(y) = v . coords(y) mod p, T the trace to GF(p)"""
        total = np.zeros((self.m, self.m), dtype=np.int64)
        power = np.eye(self.m, dtype=np.int64)
        for _ in range(self.m):
            total = (total + power) % self.p
            power = self._matmul(self.frobenius_matrix_p, power)
        return total[0].copy()

    @cached_property
    def trace_form(self) -> np.ndarray:
        """B with T(a*b) = coords(a) B coords(b) mod p"""
        functional = self.absolute_trace_functional
        columns = []
        for i in range(self.m):
            columns.append(self._matmul(functional, self.multiplication_matrix(self._from_poly([0] * i + [1]))))
        return np.array(columns, dtype=np.int64)

    def apply_matrix(self, matrix: np.ndarray, encodings) -> np.ndarray:
        """Encodings of M*y for every encoded y, processed in chunks"""
        enc = np.asarray(encodings, dtype=np.int64)
        result = np.empty(enc.shape[0], dtype=np.int64)
        transposed = matrix.T
        for start in range(0, enc.shape[0], _CHUNK):
            block = self.digits(enc[start:start + _CHUNK])
            result[start:start + _CHUNK] = self.from_digits(self._matmul(block, transposed))
        return result

    def encoding_chunks(self, ceiling: Optional[int] = None) -> Iterator[np.ndarray]:
        """Consecutive blocks of all encodings 0 .. size-1"""
        ceiling = settings.ENUMERATION_CEILING if ceiling is None else ceiling
        if self.size > ceiling:
            raise ResourceLimitError(f"GF({self.p}^{self.m}) has {self.size} elements, above the enumeration ceiling", limit=ceiling)
        self._require_bulk()
        for start in range(0, self.size, _CHUNK):
            yield np.arange(start, min(start + _CHUNK, self.size), dtype=np.int64)

    def trace_encodings(self, d: int, encodings) -> np.ndarray:
        return self.apply_matrix(self.trace_matrix(d), encodings)

    def subfield_encodings(self, d: int, ceiling: Optional[int] = None) -> np.ndarray:
        """
        Sorted encodings of GF(q^d) inside GF(q^n), spanned by the kernel of
        Frobenius^d - 1 without touching the rest of the field.
        """
        self._check_divisor(d)
        ceiling = settings.ENUMERATION_CEILING if ceiling is None else ceiling
        if self.q ** d > ceiling:
            raise ResourceLimitError(f"GF({self.q}^{d}) exceeds the enumeration ceiling", limit=ceiling)
        if d not in self._subfields:
            shifted = (self.frobenius_matrix(d) - np.eye(self.m, dtype=np.int64)) % self.p
            basis = nullspace_mod_p(shifted.tolist(), self.p)
            if len(basis) != self.s * d:
                raise InvariantViolation(f"fixed space of Frobenius^{d} has dimension {len(basis)}, expected {self.s * d}")
            digits = np.zeros((1, self.m), dtype=np.int64)
            scalars = np.arange(self.p, dtype=np.int64)
            for vector in np.array(basis, dtype=np.int64):
                digits = ((digits[None, :, :] + scalars[:, None, None] * vector[None, None, :]) % self.p).reshape(-1, self.m)
            self._subfields[d] = np.sort(self.from_digits(digits))
        return self._subfields[d]

    # Discrete logarithms
    def _require_generator(self) -> FieldElement:
        if self.generator is None:
            raise ResourceLimitError(
                f"GF({self.p}^{self.m}) is above the table ceiling; no generator or log table",
                limit=self.table_ceiling,
            )
        return self.generator

    @cached_property
    def exp_table(self) -> np.ndarray:
        """exp_table[k] = encoding of generator^k for 0 <= k < q^n - 1"""
        generator = self._require_generator()
        self._require_bulk()
        table = np.empty(self.order, dtype=np.int64)
        table[0] = self.encode(self.one())
        filled = 1
        while filled < self.order:
            count = min(filled, self.order - filled)
            shift = self.multiplication_matrix(self.pow(generator, filled))
            table[filled:filled + count] = self.apply_matrix(shift, table[:count])
            filled += count
        return table

    @cached_property
    def log_table(self) -> np.ndarray:
        """log_table[enc] = discrete log of the encoded element; -1 for zero"""
        table = np.full(self.size, -1, dtype=np.int64)
        table[self.exp_table] = np.arange(self.order, dtype=np.int64)
        if table[0] != -1 or np.count_nonzero(table >= 0) != self.order:
            raise InvariantViolation("generator powers do not cover the multiplicative group")
        logger.debug(f"log table built for GF({self.p}^{self.m})")
        return table

    def discrete_log(self, x: ElementLike) -> int:
        x = self._coerce(x)
        if x.is_zero:
            raise DomainError("zero has no discrete logarithm")
        return int(self.log_table[self.encode(x)])


@lru_cache(maxsize=64)
def build_context(p: int, s: int, n: int) -> FieldContext:
    """Construct (and cache) GF(p^(s*n)) as an extension of degree n over GF(p^s)"""
    for name, value in (("p", p), ("s", s), ("n", n)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise InputValidationError(f"{name} must be an integer, got {value!r}")
    if not is_probable_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if s < 1 or n < 1:
        raise InputValidationError(f"s and n must be positive, got s={s}, n={n}")
    if p ** (s * n) > settings.CONTEXT_CEILING:
        raise ResourceLimitError(f"GF({p}^{s * n}) is above the context ceiling", limit=settings.CONTEXT_CEILING)
    return FieldContext(p, s, n)


def split_prime_power(q: int) -> Tuple[int, int]:
    """(p, s) with q = p^s"""
    if not isinstance(q, int) or isinstance(q, bool) or q < 2:
        raise NotPrimePowerError(f"{q} is not a prime power")
    f = factorize(q)
    if f.omega != 1:
        raise NotPrimePowerError(f"{q} is not a prime power")
    return f.factors[0]


def get_context(q: int, n: int) -> FieldContext:
    p, s = split_prime_power(q)
    return build_context(p, s, n)
