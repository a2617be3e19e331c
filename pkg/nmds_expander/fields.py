"""
The subfield tower F1 = GF(q1) inside F2 = GF(q2), on top of galois.

Elements of F2 are plain ints (Fe) in 0..q2-1, the integer representation
galois uses: the base-p digits of an element are its coefficients in the
polynomial basis, lowest degree least significant. galois picks the Conway
polynomial for every field it has one for, so the representation is the same
from run to run.

The code and graph modules keep int arrays and go through the tower for
anything field-valued:

    tower = build_tower(4, 16)
    tower.field([3, 7]) * tower.field([5, 5])    # FieldArray arithmetic
    tower.matmul(messages, generator)            # int arrays in and out
    tower.null_space(parity_rows)

F1 is the set of x with x**q1 == x, i.e. 0 and the powers of g**((q2-1)/(q1-1))
for the primitive element g. subfield_basis is (1, g, ..., g**(m-1)), so an
element is in F1 exactly when its F1 coordinates 1..m-1 are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cache

import galois
import numpy as np

from .debug import debug_print
from .errors import NmdsError

Fe = int

# coords_table holds q2 x m entries.
MAX_FIELD_SIZE = 2**16


class FieldError(NmdsError):
    """Raised when a field or tower cannot be built."""


class NotPrimePower(FieldError):
    """Raised when a field size is not a power of a single prime."""


class NotASubfield(FieldError):
    """Raised when GF(q1) is not a proper subfield of GF(q2)."""


class FieldTooLarge(FieldError):
    """Raised when a field is too large for the coordinate table."""


class DivisionByZero(FieldError, ZeroDivisionError):
    """Raised when inverting or dividing by zero."""


class SingularMatrix(FieldError):
    """Raised when inverting a matrix that is not invertible."""


class ArithKind(StrEnum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    INV = "inv"
    POW = "pow"


def prime_power(value: int) -> tuple[int, int] | None:
    """(p, k) with p prime and p**k == value, or None."""
    if value < 2 or not galois.is_prime_power(value):
        return None

    (p,), (k,) = galois.factors(value)
    return int(p), int(k)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FieldTower:
    """GF(q1) inside GF(q2). Immutable; coords_table is read-only."""

    q1: int
    q2: int
    p: int
    m: int
    alpha: Fraction
    GF: type[galois.FieldArray]
    subfield_basis: tuple[Fe, ...]
    subfield_elements: tuple[Fe, ...]
    coords_table: np.ndarray

    def __repr__(self):
        return f"FieldTower(q1={self.q1}, q2={self.q2})"

    @property
    def order(self) -> int:
        """Order of the multiplicative group of F2."""
        return self.q2 - 1

    @property
    def generator(self) -> Fe:
        return int(self.GF.primitive_element)

    @property
    def poly(self) -> tuple[int, ...]:
        """The irreducible polynomial of F2, lowest degree first."""
        return tuple(int(c) for c in self.GF.irreducible_poly.coeffs[::-1])

    @property
    def subfield(self) -> np.ndarray:
        return np.asarray(self.subfield_elements, dtype=np.int32)

    def describe(self) -> dict[str, object]:
        return {"q1": self.q1, "q2": self.q2, "m": self.m, "poly": list(self.poly)}

    # ---- conversions -----------------------------------------------------

    def field(self, values) -> galois.FieldArray:
        return self.GF(np.asarray(values, dtype=np.int64))

    @staticmethod
    def ints(array: galois.FieldArray) -> np.ndarray:
        return np.asarray(array.view(np.ndarray), dtype=np.int32)

    # ---- scalar arithmetic ---------------------------------------------

    def add(self, a: Fe, b: Fe) -> Fe:
        return int(self.GF(a) + self.GF(b))

    def neg(self, a: Fe) -> Fe:
        return int(-self.GF(a))

    def sub(self, a: Fe, b: Fe) -> Fe:
        return int(self.GF(a) - self.GF(b))

    def mul(self, a: Fe, b: Fe) -> Fe:
        return int(self.GF(a) * self.GF(b))

    def inv(self, a: Fe) -> Fe:
        if a == 0:
            raise DivisionByZero("0 has no inverse")
        return int(np.reciprocal(self.GF(a)))

    def div(self, a: Fe, b: Fe) -> Fe:
        return self.mul(a, self.inv(b))

    def pow(self, a: Fe, k: int) -> Fe:
        if a == 0 and k < 0:
            raise DivisionByZero("0 has no inverse")
        return int(self.GF(a) ** k)

    def arith(self, a: Fe, b: Fe = 0, kind: ArithKind | str = ArithKind.ADD) -> Fe:
        """Dispatch on kind; for POW, b is the (integer) exponent."""
        match ArithKind(kind):
            case ArithKind.ADD:
                return self.add(a, b)
            case ArithKind.SUB:
                return self.sub(a, b)
            case ArithKind.MUL:
                return self.mul(a, b)
            case ArithKind.DIV:
                return self.div(a, b)
            case ArithKind.INV:
                return self.inv(a)
            case ArithKind.POW:
                return self.pow(a, b)

    def in_subfield(self, x: Fe) -> bool:
        return self.pow(x, self.q1) == x

    def to_coords(self, x: Fe) -> tuple[Fe, ...]:
        """F1 coordinates of x in subfield_basis."""
        return tuple(int(c) for c in self.coords_table[x])

    def from_coords(self, coords: tuple[Fe, ...] | list[Fe]) -> Fe:
        if len(coords) != self.m:
            raise ValueError(f"Expected {self.m} coordinates, got {len(coords)}")
        return int(np.add.reduce(self.field(coords) * self.field(self.subfield_basis)))

    # ---- matrices over F2 ----------------------------------------------

    def matmul(self, x, y) -> np.ndarray:
        """x @ y over F2 for 2-d int arrays."""
        x = np.asarray(x)
        y = np.asarray(y)
        if x.shape[1] != y.shape[0]:
            raise ValueError(f"Shape mismatch {x.shape} @ {y.shape}")
        if not x.shape[1]:
            return np.zeros((x.shape[0], y.shape[1]), dtype=np.int32)

        return self.ints(self.field(x) @ self.field(y))

    def vecmat(self, v, matrix) -> np.ndarray:
        return self.matmul(np.asarray(v)[None, :], matrix)[0]

    def row_reduce(self, matrix) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and the pivot columns."""
        reduced = self.field(matrix).row_reduce()
        pivots = [int(np.flatnonzero(row)[0]) for row in reduced if row.any()]
        return self.ints(reduced), pivots

    def rank(self, matrix) -> int:
        matrix = np.asarray(matrix)
        if not matrix.size:
            return 0
        return int(np.linalg.matrix_rank(self.field(matrix)))

    def null_space(self, matrix, cols: int | None = None) -> np.ndarray:
        """Basis of {x : matrix @ x = 0}, one vector per row.

        cols is needed only when the matrix has no rows.
        """
        matrix = np.asarray(matrix, dtype=np.int32)
        if matrix.size == 0:
            n = matrix.shape[1] if matrix.ndim == 2 and matrix.shape[1] else cols or 0
            return np.eye(n, dtype=np.int32)

        n = matrix.shape[1]
        if self.rank(matrix) == n:
            return np.zeros((0, n), dtype=np.int32)
        return self.ints(self.field(matrix).null_space())

    def inverse(self, matrix) -> np.ndarray:
        matrix = np.asarray(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise SingularMatrix(f"Matrix of shape {matrix.shape} is not square")
        try:
            return self.ints(np.linalg.inv(self.field(matrix)))
        except np.linalg.LinAlgError as ex:
            raise SingularMatrix("Matrix is singular") from ex

    def solve(self, a, b) -> np.ndarray | None:
        """One solution of a @ x = b (free variables zero), or None."""
        a = np.asarray(a, dtype=np.int32)
        n = a.shape[1]
        augmented = np.hstack([a, np.asarray(b, dtype=np.int32)[:, None]])

        reduced, pivots = self.row_reduce(augmented)
        if n in pivots:
            return None

        x = np.zeros(n, dtype=np.int32)
        for i, col in enumerate(pivots):
            x[col] = reduced[i, n]
        return x

    def random_elements(self, rng: np.random.Generator, size, subfield=False):
        pool = self.subfield if subfield else np.arange(self.q2, dtype=np.int32)
        return rng.choice(pool, size=size).astype(np.int32)


def _coords_table(GF: type[galois.FieldArray], basis: tuple[Fe, ...], subfield: tuple[Fe, ...]):
    """F1 coordinates of every element of F2, indexed by element."""
    m = len(basis)
    grids = np.meshgrid(*([np.asarray(subfield)] * m), indexing="ij")
    coords = np.stack(grids, axis=-1).reshape(-1, m)

    values = np.add.reduce(GF(coords) * GF(np.asarray(basis)), axis=1)
    values = np.asarray(values.view(np.ndarray), dtype=np.int64)
    if len(np.unique(values)) != len(values):
        raise FieldError(f"Subfield basis {basis} is not F1-independent")

    table = np.zeros((GF.order, m), dtype=np.int32)
    table[values] = coords
    return _frozen(table)


@cache
def build_tower(q1: int, q2: int) -> FieldTower:
    """Build GF(q1) < GF(q2). Towers are cached per (q1, q2)."""
    pp1 = prime_power(q1)
    pp2 = prime_power(q2)
    if pp1 is None or pp2 is None:
        bad = q1 if pp1 is None else q2
        raise NotPrimePower(f"{bad} is not a prime power")

    (p, n1), (p2, n2) = pp1, pp2
    if p != p2:
        raise NotPrimePower(f"{q1} and {q2} are powers of different primes")
    if q1 >= q2 or n2 % n1:
        raise NotASubfield(f"GF({q1}) is not a proper subfield of GF({q2})")
    if q2 > MAX_FIELD_SIZE:
        raise FieldTooLarge(f"GF({q2}) exceeds the limit of {MAX_FIELD_SIZE}")

    GF = galois.GF(q2)
    g = GF.primitive_element
    m = n2 // n1

    step = (q2 - 1) // (q1 - 1)
    powers = g ** (np.arange(q1 - 1) * step)
    subfield_elements = tuple(sorted([0, *(int(x) for x in powers)]))
    basis = tuple(int(x) for x in g ** np.arange(m))

    tower = FieldTower(
        q1=q1,
        q2=q2,
        p=p,
        m=m,
        alpha=Fraction(n1, n2),
        GF=GF,
        subfield_basis=basis,
        subfield_elements=subfield_elements,
        coords_table=_coords_table(GF, basis, subfield_elements),
    )

    debug_print(f"Built {tower!r} over {GF.irreducible_poly}, basis {basis}")
    return tower
