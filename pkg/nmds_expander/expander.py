"""
The mixed-alphabet expander code C on the edges of a bipartite graph.

A word of C has one symbol per edge. Its restriction to E(u) must lie in the
left constituent C'_u and its restriction to E(v) in the right constituent
C''_v. Both constituents restrict exactly the coordinates labeled 1 by a good
assignment to the subfield F1, so C is F1-linear but not F2-linear. Its basis
is found by writing every symbol in F1 coordinates and eliminating over F1.

The concatenated view (C)_Phi replaces each left block by its information
word; psi and psi_inv move between the two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from .assignment import (
    BalanceTrace,
    EdgeLabeling,
    balance,
    init_left_exact,
    load_assignment,
    require_good,
    save_assignment,
)
from .debug import debug_print
from .errors import NmdsError, TooLarge
from .fields import Fe, FieldTower, build_tower
from .graph import BipartiteGraph, load_graph, save_graph
from .mds_codes import (
    CodeError,
    MixedMdsCode,
    make_mixed,
    make_rs,
    message_grid,
)
from .preferences import get_preferences
from .tradeoff import code_rate_bound, outer_distance_bound, outer_rate_bound
from .util import Rat, as_fraction, format_fraction

INSTANCE_FILE_NAME = "instance.json"
GRAPH_FILE_NAME = "graph.json"
ASSIGNMENT_FILE_NAME = "assignment.json"

BASIS_ORDER = "row per basis word; column e*m + i holds F1 coordinate i of edge e"


class ExpanderError(NmdsError):
    """Raised when an expander code instance cannot be built or used."""


class NotACodeword(ExpanderError):
    """Raised when a word or outer word is not in the code."""


@dataclass(frozen=True)
class SubfieldBasis:
    # dim x (n*delta*m) F1 coordinates, see BASIS_ORDER
    coords: np.ndarray
    # dim x (n*delta) words over F2
    words: np.ndarray

    @property
    def dim(self) -> int:
        return self.words.shape[0]


@dataclass(frozen=True)
class OuterWord:
    """One information word of C'_u per left vertex."""

    symbols: tuple[tuple[Fe, ...], ...]

    def nonzero_blocks(self) -> int:
        return sum(any(block) for block in self.symbols)


@dataclass(frozen=True)
class RateReport:
    dim: int
    rate_c: Fraction
    outer_rate: Fraction
    code_bound: Fraction
    outer_bound: Fraction

    @property
    def meets_bounds(self) -> bool:
        return self.rate_c >= self.code_bound and self.outer_rate >= self.outer_bound

    def as_record(self) -> dict[str, object]:
        return {
            "dim": self.dim,
            "rate_c": self.rate_c,
            "outer_rate": self.outer_rate,
            "code_bound": self.code_bound,
            "outer_bound": self.outer_bound,
            "meets_bounds": self.meets_bounds,
        }


def _local_support(k: int, f1: list[int], delta: int) -> list[int]:
    """The F1 positions first, then the lowest free positions, up to k."""
    taken = set(f1)
    rest = [i for i in range(delta) if i not in taken]
    return sorted(f1 + rest[: k - len(f1)])


@dataclass(frozen=True, eq=False)
class ExpanderCodeInstance:
    graph: BipartiteGraph
    tower: FieldTower
    r: Fraction
    R: Fraction
    p: Fraction
    assignment: EdgeLabeling
    left_codes: tuple[MixedMdsCode, ...]
    right_codes: tuple[MixedMdsCode, ...]
    trace: BalanceTrace | None = None

    def __repr__(self):
        return (
            f"ExpanderCodeInstance(n={self.n}, delta={self.delta}, q1={self.tower.q1}, "
            f"q2={self.tower.q2}, r={self.r}, R={self.R}, p={self.p})"
        )

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def delta(self) -> int:
        return self.graph.delta

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges

    @cached_property
    def f1_mask(self) -> np.ndarray:
        mask = np.array(self.assignment.bits, dtype=bool)
        mask.setflags(write=False)
        return mask

    @cached_property
    def subfield_basis(self) -> SubfieldBasis:
        return basis_over_subfield(self)

    @property
    def dim(self) -> int:
        """Dimension of C over F1."""
        return self.subfield_basis.dim

    @property
    def theta(self) -> Fraction:
        """Relative distance of the left constituents."""
        return Fraction(self.left_codes[0].d_sym, self.delta)

    @property
    def delta_rel(self) -> Fraction:
        """Relative distance of the right constituents."""
        return Fraction(self.right_codes[0].d_sym, self.delta)

    @property
    def log_phi_u_q2(self) -> Fraction:
        """log_q2 |Phi_u| = p*delta*alpha + (r - p)*delta"""
        return (self.p * self.tower.alpha + self.r - self.p) * self.delta

    @property
    def phi_u_size(self) -> int:
        """|Phi_u| = q1**(p*delta) * q2**((r - p)*delta)"""
        f1 = int(self.p * self.delta)
        free = int((self.r - self.p) * self.delta)
        return self.tower.q1**f1 * self.tower.q2**free

    @property
    def right_weights(self) -> tuple[Fraction, ...]:
        """j_v for every right vertex."""
        return tuple(code.p for code in self.right_codes)

    @property
    def right_rates(self) -> tuple[Fraction, ...]:
        """R'_v for every right vertex."""
        return tuple(code.rate_q2 for code in self.right_codes)

    @property
    def right_lengths(self) -> tuple[Fraction, ...]:
        """Length of every C''_v in q2-ary symbols."""
        return tuple(code.length_q2 for code in self.right_codes)

    @property
    def left_rate(self) -> Fraction:
        """r', the same for every left vertex."""
        return self.left_codes[0].rate_q2

    def left_block(self, word, u: int) -> tuple[Fe, ...]:
        return tuple(int(word[e]) for e in self.graph.left_edges[u])

    def right_block(self, word, v: int) -> tuple[Fe, ...]:
        return tuple(int(word[e]) for e in self.graph.right_edges[v])

    def describe(self) -> dict[str, object]:
        return {
            "n": self.n,
            "delta": self.delta,
            "q1": self.tower.q1,
            "q2": self.tower.q2,
            "r": format_fraction(self.r),
            "R": format_fraction(self.R),
            "p": format_fraction(self.p),
        }


def _check_integral(name: str, value: Fraction, delta: int):
    if (value * delta).denominator != 1:
        raise CodeError(f"{name} * delta = {value * delta} is not an integer")
    if not 0 <= value <= 1:
        raise CodeError(f"{name} must lie in [0, 1], got {value}")


def instance_from_parts(
    graph: BipartiteGraph,
    tower: FieldTower,
    r: Fraction,
    R: Fraction,
    p: Fraction,
    lab: EdgeLabeling,
    trace: BalanceTrace | None = None,
) -> ExpanderCodeInstance:
    """Build the constituents of C from a good assignment."""
    if lab.graph is not graph or lab.p != p:
        raise ExpanderError(f"Assignment does not belong to this graph with p={p}")
    require_good(lab)

    delta = graph.delta
    k_left = int(r * delta)
    k_right = int(R * delta)
    left_parent = make_rs(tower, delta, k_left)
    right_parent = make_rs(tower, delta, k_right)

    left_codes = []
    for edges in graph.left_edges:
        f1 = [pos for pos, e in enumerate(edges) if lab.bits[e]]
        support = _local_support(k_left, f1, delta)
        left_codes.append(make_mixed(left_parent, support, f1))

    right_codes = []
    for edges in graph.right_edges:
        f1 = [pos for pos, e in enumerate(edges) if lab.bits[e]]
        support = _local_support(k_right, f1, delta)
        right_codes.append(make_mixed(right_parent, support, f1))

    return ExpanderCodeInstance(
        graph=graph,
        tower=tower,
        r=r,
        R=R,
        p=p,
        assignment=lab,
        left_codes=tuple(left_codes),
        right_codes=tuple(right_codes),
        trace=trace,
    )


def assemble(
    graph: BipartiteGraph,
    tower: FieldTower,
    r: Rat,
    R: Rat,
    p: Rat,
    seed: int = 0,
    *,
    compute_basis: bool = True,
) -> ExpanderCodeInstance:
    """Balance a random assignment with pbar = R (capped below 1) and build C on it."""
    r, R, p = as_fraction(r), as_fraction(R), as_fraction(p)
    for name, value in (("r", r), ("R", R), ("p", p)):
        _check_integral(name, value, graph.delta)
    if r == 0 or R == 0:
        raise CodeError("Constituent codes need a positive dimension")
    if p > r or p > R:
        raise ExpanderError(f"Need p <= r and p <= R, got p={p}, r={r}, R={R}")

    # A full right code has no share limit of its own; the cap stays below 1.
    pbar = R if R < 1 else Fraction(graph.delta - 1, graph.delta)
    lab, trace = balance(init_left_exact(graph, p, seed, pbar=pbar))
    inst = instance_from_parts(graph, tower, r, R, p, lab, trace)

    if compute_basis:
        basis = inst.subfield_basis
        debug_print(f"{inst!r}: dim over F1 = {basis.dim} after {trace.reversals} reversals")

    return inst


def _block_constraints(tower: FieldTower, h: np.ndarray) -> np.ndarray:
    """F1 rows of h @ x = 0 with every symbol of x in F1 coordinates.

    Row (j, t) and column (pos, i) hold coordinate t of h[j, pos] * b_i.
    """
    rows, width = h.shape
    basis = tower.field(tower.subfield_basis)
    products = tower.ints(tower.field(h)[:, :, None] * basis[None, None, :])
    coords = tower.coords_table[products]
    return coords.transpose(0, 3, 1, 2).reshape(rows * tower.m, width * tower.m)


def basis_over_subfield(inst: ExpanderCodeInstance) -> SubfieldBasis:
    tower = inst.tower
    m = tower.m
    unknowns = inst.num_edges * m

    limit = get_preferences().max_unknowns
    if unknowns > limit:
        raise TooLarge(f"{unknowns} F1 unknowns exceed the limit of {limit}")

    blocks = []
    offsets = np.arange(m)
    sides = (
        (inst.left_codes[0].parent.parity_check, inst.graph.left_edges),
        (inst.right_codes[0].parent.parity_check, inst.graph.right_edges),
    )
    for h, views in sides:
        if not len(h):
            continue
        local = _block_constraints(tower, np.asarray(h))
        for edges in views:
            columns = (np.asarray(edges)[:, None] * m + offsets[None, :]).ravel()
            block = np.zeros((local.shape[0], unknowns), dtype=np.int32)
            block[:, columns] = local
            blocks.append(block)

    # Edges labeled 1 carry F1 values: coordinates 1..m-1 vanish.
    ones = np.flatnonzero(inst.f1_mask)
    if len(ones):
        pins = (ones[:, None] * m + offsets[None, 1:]).ravel()
        block = np.zeros((len(pins), unknowns), dtype=np.int32)
        block[np.arange(len(pins)), pins] = 1
        blocks.append(block)

    system = np.vstack(blocks) if blocks else np.zeros((0, unknowns), dtype=np.int32)
    coords = tower.null_space(system, cols=unknowns)

    dim = coords.shape[0]
    column = np.asarray(tower.subfield_basis, dtype=np.int32)[:, None]
    words = tower.matmul(coords.reshape(dim * inst.num_edges, m), column)
    words = words.reshape(dim, inst.num_edges)

    coords.setflags(write=False)
    words.setflags(write=False)
    return SubfieldBasis(coords, words)


def rate_of(inst: ExpanderCodeInstance) -> RateReport:
    alpha = inst.tower.alpha
    shift = inst.p * (alpha - 1)
    dim = inst.dim
    return RateReport(
        dim=dim,
        rate_c=Fraction(dim) * alpha / (inst.num_edges * (shift + 1)),
        outer_rate=Fraction(dim) * alpha / (inst.num_edges * (shift + inst.r)),
        code_bound=code_rate_bound(inst.R, inst.r, inst.p, alpha),
        outer_bound=outer_rate_bound(inst.R, inst.r, inst.p, alpha),
    )


def contains(inst: ExpanderCodeInstance, word) -> bool:
    if len(word) != inst.num_edges:
        return False

    left = all(
        code.contains(inst.left_block(word, u)) for u, code in enumerate(inst.left_codes)
    )
    return left and all(
        code.contains(inst.right_block(word, v)) for v, code in enumerate(inst.right_codes)
    )


def random_codeword(inst: ExpanderCodeInstance, rng: np.random.Generator) -> tuple[Fe, ...]:
    """A uniform F1-combination of the basis."""
    words = inst.subfield_basis.words
    if not len(words):
        return (0,) * inst.num_edges

    coeffs = inst.tower.random_elements(rng, len(words), subfield=True)
    return tuple(int(x) for x in inst.tower.vecmat(coeffs, words))


def enumerate_codewords(inst: ExpanderCodeInstance) -> np.ndarray:
    """Every codeword of C, one per row; row 0 is the zero word."""
    basis = inst.subfield_basis
    size = inst.tower.q1**basis.dim
    limit = get_preferences().max_enumeration
    if size > limit:
        raise TooLarge(f"C has {size} words, the limit is {limit}")

    if not basis.dim:
        return np.zeros((1, inst.num_edges), dtype=np.int32)

    grid = message_grid([inst.tower.subfield] * basis.dim)
    return inst.tower.matmul(grid, basis.words)


def psi(inst: ExpanderCodeInstance, word) -> OuterWord:
    if not contains(inst, word):
        raise NotACodeword("Word is not in C")

    return OuterWord(
        tuple(code.extract(inst.left_block(word, u)) for u, code in enumerate(inst.left_codes))
    )


def psi_inv(inst: ExpanderCodeInstance, outer: OuterWord) -> tuple[Fe, ...]:
    if len(outer.symbols) != inst.n:
        raise NotACodeword(f"Outer word has {len(outer.symbols)} symbols, expected {inst.n}")

    word = [0] * inst.num_edges
    for u, (code, symbol) in enumerate(zip(inst.left_codes, outer.symbols, strict=True)):
        if any(not 0 <= int(x) < inst.tower.q2 for x in symbol):
            raise NotACodeword(f"Symbol {u} holds a value outside GF({inst.tower.q2})")
        try:
            block = code.encode(symbol)
        except CodeError as ex:
            raise NotACodeword(f"Symbol {u} is not in Phi_u: {ex}") from ex
        for e, value in zip(inst.graph.left_edges[u], block, strict=True):
            word[e] = value

    if not contains(inst, word):
        raise NotACodeword("Outer word does not satisfy the right constraints")

    return tuple(word)


def min_outer_distance_bruteforce(inst: ExpanderCodeInstance) -> int | None:
    """Fewest nonzero left blocks over nonzero codewords; None for the zero code."""
    if not inst.dim:
        return None

    codewords = enumerate_codewords(inst)
    blocks = codewords.reshape(len(codewords), inst.n, inst.delta).any(axis=2).sum(axis=1)
    return int(blocks[blocks > 0].min())


def outer_distance_guarantee(inst: ExpanderCodeInstance, gamma: float):
    """The lower bound on the relative outer distance for this instance's theta and delta."""
    return outer_distance_bound(inst.delta_rel, inst.theta, gamma)


def save_instance(inst: ExpanderCodeInstance, directory: Path) -> Path:
    """Write graph, assignment and instance manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_graph(inst.graph, directory / GRAPH_FILE_NAME)
    save_assignment(inst.assignment, directory / ASSIGNMENT_FILE_NAME)

    basis = inst.subfield_basis
    manifest = {
        **inst.describe(),
        "graph": GRAPH_FILE_NAME,
        "assignment": ASSIGNMENT_FILE_NAME,
        "left_codes": [code.describe() for code in inst.left_codes],
        "right_codes": [code.describe() for code in inst.right_codes],
        "dim": basis.dim,
        "basis_order": BASIS_ORDER,
        "basis": basis.coords.tolist(),
    }

    path = directory / INSTANCE_FILE_NAME
    path.write_text(json.dumps(manifest) + "\n", encoding="utf-8")
    return path


def load_instance(path: Path) -> ExpanderCodeInstance:
    """Rebuild an instance from its manifest without re-balancing."""
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
        graph = load_graph(path.parent / manifest["graph"])
        tower = build_tower(int(manifest["q1"]), int(manifest["q2"]))
        r, R, p = (as_fraction(manifest[key]) for key in ("r", "R", "p"))
    except (OSError, KeyError, ValueError) as ex:
        raise ExpanderError(f"Could not read instance {path}: {ex}") from ex

    lab = load_assignment(path.parent / manifest["assignment"], graph)
    inst = instance_from_parts(graph, tower, r, R, p, lab)

    if inst.dim != manifest.get("dim", inst.dim):
        raise ExpanderError(f"Instance {path} records dim {manifest['dim']}, got {inst.dim}")

    return inst
