"""
Reed-Solomon constituent codes and their mixed-alphabet subcodes.

An RsCode is the evaluation code of polynomials of degree < k at the first
n field elements (index order). It is MDS, so any k coordinates form an
information set and encode_systematic_at can put the message anywhere.

A MixedMdsCode restricts some information coordinates (f1_positions) to the
subfield F1. It is F1-linear but no longer F2-linear, keeps the parent's
minimum distance, and its size is q1**|f1| * q2**(k - |f1|).

Decoding is bounded distance: decode_ee returns the codeword whenever
2t + rho <= d - 1 and otherwise returns a DecodeFailure value or some other
codeword. Errors-and-erasures decoding punctures the erased coordinates and
runs Berlekamp-Welch on what is left.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from math import comb, prod

import galois
import numpy as np

from .errors import NmdsError, TooLarge
from .fields import Fe, FieldTower, build_tower
from .preferences import get_preferences

Word = tuple[Fe, ...]


class CodeError(NmdsError):
    """Raised when a constituent code cannot be built or used."""


class LengthExceedsField(CodeError):
    """Raised when a Reed-Solomon code is longer than its field."""


class BadSupportSize(CodeError):
    """Raised when an information support or message has the wrong size."""


class SupportMismatch(CodeError):
    """Raised when the F1 positions are not inside the information support."""


class NotInSubcode(CodeError):
    """Raised when a message puts a non-subfield value on an F1 position."""


@dataclass(frozen=True)
class DecodeFailure:
    """A bounded-distance decoder gave up. This is a result, not an error."""

    reason: str


@dataclass(frozen=True, eq=False)
class RsCode:
    tower: FieldTower
    n_sym: int
    k_sym: int
    eval_points: tuple[Fe, ...]

    @property
    def d_sym(self) -> int:
        return self.n_sym - self.k_sym + 1

    @property
    def size(self) -> int:
        return self.tower.q2**self.k_sym

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        """Vandermonde rows x**i for i < k."""
        points = self.tower.field(self.eval_points)
        g = self.tower.ints(points ** np.arange(self.k_sym)[:, None])
        g.setflags(write=False)
        return g

    @cached_property
    def parity_check(self) -> np.ndarray:
        h = self.tower.null_space(self.generator_matrix)
        h.setflags(write=False)
        return h

    def systematic_matrix(self, info_support: Sequence[int]) -> np.ndarray:
        """A with msg @ A the codeword that reads msg back on info_support."""
        return _systematic_matrix(self, _check_support(self, info_support))

    def encode(self, msg: Sequence[Fe]) -> Word:
        if len(msg) != self.k_sym:
            raise BadSupportSize(f"Message has {len(msg)} symbols, expected {self.k_sym}")
        return _word(self.tower.vecmat(msg, self.generator_matrix))

    def contains(self, word: Sequence[Fe]) -> bool:
        if len(word) != self.n_sym:
            return False
        if not len(self.parity_check):
            return True
        syndrome = self.tower.matmul(self.parity_check, np.asarray(word)[:, None])
        return not syndrome.any()

    def describe(self) -> dict[str, object]:
        return {
            "q1": self.tower.q1,
            "q2": self.tower.q2,
            "n": self.n_sym,
            "k": self.k_sym,
        }


@dataclass(frozen=True, eq=False)
class MixedMdsCode:
    parent: RsCode
    info_support: tuple[int, ...]
    f1_positions: tuple[int, ...]

    @property
    def tower(self) -> FieldTower:
        return self.parent.tower

    @property
    def n_sym(self) -> int:
        return self.parent.n_sym

    @property
    def k_sym(self) -> int:
        return self.parent.k_sym

    @property
    def d_sym(self) -> int:
        return self.parent.d_sym

    @property
    def p(self) -> Fraction:
        """Share of coordinates restricted to F1."""
        return Fraction(len(self.f1_positions), self.n_sym)

    @property
    def size(self) -> int:
        f1 = len(self.f1_positions)
        return self.tower.q1**f1 * self.tower.q2 ** (self.k_sym - f1)

    @property
    def log_size_q2(self) -> Fraction:
        f1 = len(self.f1_positions)
        return f1 * self.tower.alpha + (self.k_sym - f1)

    @property
    def length_q2(self) -> Fraction:
        """Length in q2-ary symbols: (p(alpha - 1) + 1) * n."""
        return len(self.f1_positions) * (self.tower.alpha - 1) + self.n_sym

    @property
    def rate_q2(self) -> Fraction:
        return self.log_size_q2 / self.length_q2

    @property
    def f1_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_sym, dtype=bool)
        mask[list(self.f1_positions)] = True
        return mask

    def message_alphabets(self) -> list[np.ndarray]:
        f1 = set(self.f1_positions)
        full = np.arange(self.tower.q2, dtype=np.int32)
        return [self.tower.subfield if i in f1 else full for i in self.info_support]

    def encode(self, msg: Sequence[Fe]) -> Word:
        """The systematic encoder: msg appears on info_support."""
        if len(msg) != self.k_sym:
            raise BadSupportSize(f"Message has {len(msg)} symbols, expected {self.k_sym}")

        f1 = set(self.f1_positions)
        for position, value in zip(self.info_support, msg, strict=True):
            if position in f1 and not self.tower.in_subfield(int(value)):
                raise NotInSubcode(f"Position {position} needs an F1 value, got {value}")

        return encode_systematic_at(self.parent, self.info_support, msg)

    def extract(self, word: Sequence[Fe]) -> Word:
        """Inverse of encode on codewords: the symbols on info_support."""
        return tuple(int(word[i]) for i in self.info_support)

    def contains(self, word: Sequence[Fe]) -> bool:
        if not self.parent.contains(word):
            return False
        return all(self.tower.in_subfield(int(word[i])) for i in self.f1_positions)

    def describe(self) -> dict[str, object]:
        return {
            **self.parent.describe(),
            "info_support": list(self.info_support),
            "f1_positions": list(self.f1_positions),
        }


def closed_form_rate(p: Fraction, r: Fraction, alpha: Fraction) -> Fraction:
    """(p(alpha - 1) + r) / (p(alpha - 1) + 1)"""
    shift = p * (alpha - 1)
    return (shift + r) / (shift + 1)


def _word(array: Iterable) -> Word:
    return tuple(int(x) for x in array)


def _check_support(code: RsCode, info_support: Sequence[int]) -> tuple[int, ...]:
    support = tuple(int(i) for i in info_support)
    if len(support) != code.k_sym or len(set(support)) != len(support):
        raise BadSupportSize(
            f"Information support needs {code.k_sym} distinct positions, got {support}"
        )
    if any(not 0 <= i < code.n_sym for i in support):
        raise BadSupportSize(f"Support {support} is outside 0..{code.n_sym - 1}")
    return support


@cache
def _systematic_matrix(code: RsCode, support: tuple[int, ...]) -> np.ndarray:
    g = code.generator_matrix
    matrix = code.tower.matmul(code.tower.inverse(g[:, support]), g)
    matrix.setflags(write=False)
    return matrix


def make_rs(tower: FieldTower, n_sym: int, k_sym: int) -> RsCode:
    if n_sym > tower.q2:
        raise LengthExceedsField(f"Length {n_sym} exceeds GF({tower.q2})")
    if not 1 <= k_sym <= n_sym:
        raise CodeError(f"Need 1 <= k <= n, got k={k_sym}, n={n_sym}")

    return RsCode(tower, n_sym, k_sym, tuple(range(n_sym)))


def encode_systematic_at(
    code: RsCode, info_support: Sequence[int], msg: Sequence[Fe]
) -> Word:
    if len(msg) != code.k_sym:
        raise BadSupportSize(f"Message has {len(msg)} symbols, expected {code.k_sym}")

    matrix = code.systematic_matrix(info_support)
    return _word(code.tower.vecmat(np.asarray(msg, dtype=np.int32), matrix))


def make_mixed(
    code: RsCode, info_support: Sequence[int], f1_positions: Iterable[int]
) -> MixedMdsCode:
    """The subcode of code with f1_positions restricted to F1.

    info_support keeps the caller's order: message symbol i lands on
    info_support[i].
    """
    support = _check_support(code, info_support)
    f1 = tuple(sorted({int(i) for i in f1_positions}))
    if not set(f1) <= set(support):
        raise SupportMismatch(f"F1 positions {f1} are not inside support {support}")

    return MixedMdsCode(code, support, f1)


def mixed_from_record(record: dict) -> MixedMdsCode:
    """Inverse of MixedMdsCode.describe()."""
    tower = build_tower(int(record["q1"]), int(record["q2"]))
    parent = make_rs(tower, int(record["n"]), int(record["k"]))
    return make_mixed(parent, record["info_support"], record["f1_positions"])


def decode_ee(
    code: RsCode, received: Sequence[Fe], erasures: Iterable[int] = ()
) -> Word | DecodeFailure:
    """Errors-and-erasures bounded-distance decoding.

    Symbols at erased positions are ignored.
    """
    tower = code.tower
    n, k = code.n_sym, code.k_sym
    if len(received) != n:
        raise BadSupportSize(f"Received {len(received)} symbols, expected {n}")

    erased = {int(i) for i in erasures}
    if any(not 0 <= i < n for i in erased):
        raise BadSupportSize(f"Erasures {sorted(erased)} are outside 0..{n - 1}")

    keep = [i for i in range(n) if i not in erased]
    if len(keep) < k:
        return DecodeFailure(f"{len(erased)} erasures leave fewer than {k} symbols")

    # Berlekamp-Welch: Q(x) = E(x) y(x) on kept points, E monic of degree e.
    e = (len(keep) - k) // 2
    x = tower.field([code.eval_points[i] for i in keep])
    y = tower.field([int(received[i]) for i in keep])
    powers = x[:, None] ** np.arange(e + k)[None, :]
    rows = np.hstack([tower.ints(powers), tower.ints(-(y[:, None] * powers[:, :e]))])
    rhs = tower.ints(y * x**e)

    solution = tower.solve(rows, rhs)
    if solution is None:
        return DecodeFailure("no error locator fits the received word")

    q_poly = galois.Poly(tower.field(solution[: e + k]), order="asc")
    e_poly = galois.Poly(tower.field([*solution[e + k :], 1]), order="asc")
    message_poly, remainder = divmod(q_poly, e_poly)
    if np.count_nonzero(remainder.coeffs) or message_poly.degree >= k:
        return DecodeFailure("error locator does not divide")

    codeword = _word(message_poly(tower.field(code.eval_points)))
    if sum(codeword[i] != int(received[i]) for i in keep) > e:
        return DecodeFailure(f"more than {e} errors")

    return codeword


# ---- brute force --------------------------------------------------------------


def message_grid(alphabets: Sequence[np.ndarray]) -> np.ndarray:
    if not alphabets:
        return np.zeros((1, 0), dtype=np.int32)

    grids = np.meshgrid(*alphabets, indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, len(alphabets)).astype(np.int32)


def enumerate_codewords(code: RsCode | MixedMdsCode) -> np.ndarray:
    """Every codeword, one per row; row 0 is the zero word."""
    limit = get_preferences().max_enumeration
    if code.size > limit:
        raise TooLarge(f"Code has {code.size} words, the limit is {limit}")

    if isinstance(code, MixedMdsCode):
        alphabets = code.message_alphabets()
        matrix = code.parent.systematic_matrix(code.info_support)
    else:
        alphabets = [np.arange(code.tower.q2, dtype=np.int32)] * code.k_sym
        matrix = code.generator_matrix

    return code.tower.matmul(message_grid(alphabets), matrix)


def _min_distance_by_columns(code: RsCode) -> int:
    """Smallest number of linearly dependent parity-check columns."""
    h = code.parity_check
    for weight in range(1, code.n_sym + 1):
        if comb(code.n_sym, weight) > get_preferences().max_enumeration:
            raise TooLarge(f"Too many column subsets of size {weight}")
        for columns in itertools.combinations(range(code.n_sym), weight):
            if code.tower.rank(h[:, list(columns)]) < weight:
                return weight

    return code.n_sym + 1


def min_distance_bruteforce(code: RsCode | MixedMdsCode) -> int:
    """Exact minimum distance by enumerating the codebook.

    An RsCode too large to enumerate is F2-linear, so its distance is also
    the smallest set of dependent parity-check columns; that search is used
    instead. Mixed codes have no such shortcut.
    """
    if isinstance(code, RsCode) and code.size > get_preferences().max_enumeration:
        return _min_distance_by_columns(code)

    codewords = enumerate_codewords(code)
    weights = np.count_nonzero(codewords, axis=1)
    nonzero = weights[weights > 0]
    if not len(nonzero):
        raise CodeError("Code has no nonzero codeword")

    return int(nonzero.min())


def subcode_size(code: MixedMdsCode) -> int:
    return prod(len(a) for a in code.message_alphabets())
