"""
Good edge assignments: exactly p*delta ones in every E(u), at most
pbar*delta ones in every E(v).

A labeling is turned into a directed graph: an edge labeled 1 points from its
right endpoint to its left endpoint, an edge labeled 0 the other way. A
directed path from an overweight right vertex to a right vertex with spare
room alternates 1-arcs and 0-arcs; flipping every bit on it moves one unit of
weight from the source to the sink and leaves every other vertex untouched.
balance repeats this until no right vertex is overweight.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import StrEnum
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import networkx as nx
import numpy as np

from .debug import debug_print
from .errors import NmdsError
from .graph import BipartiteGraph
from .preferences import get_preferences
from .util import Rat, as_fraction, format_fraction


class AssignmentError(NmdsError):
    """Raised when an assignment cannot be built or balanced."""


class NonIntegerWeight(AssignmentError):
    """Raised when p * delta or pbar * delta is not an integer."""


class NoPathFound(AssignmentError):
    """Raised when no reversal path leaves an overweight vertex."""


class MalformedPath(AssignmentError):
    """Raised when an edge list is not an alternating reversal path."""


class InvariantViolation(AssignmentError):
    """Raised when a reversal changes a weight it must preserve."""


class NotGood(AssignmentError):
    """Raised when a labeling that must be good is not."""


class Side(StrEnum):
    LEFT = "left"
    RIGHT = "right"


class Vertex(NamedTuple):
    side: Side
    index: int


class Arc(NamedTuple):
    edge: int
    tail: Vertex
    head: Vertex
    bit: int


@dataclass(frozen=True, eq=False)
class EdgeLabeling:
    graph: BipartiteGraph
    bits: tuple[int, ...]
    p: Fraction
    pbar: Fraction
    seed: int | None = None

    def __post_init__(self):
        if len(self.bits) != self.graph.num_edges:
            raise AssignmentError(
                f"Expected {self.graph.num_edges} bits, got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise AssignmentError("Bits must be 0 or 1")
        if not 0 <= self.p <= 1:
            raise AssignmentError(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= self.pbar < 1:
            raise AssignmentError(f"pbar must lie in [0, 1), got {self.pbar}")
        for name in ("p", "pbar"):
            value = getattr(self, name)
            if (value * self.graph.delta).denominator != 1:
                raise NonIntegerWeight(
                    f"{name} * delta = {value * self.graph.delta} is not an integer"
                )

    def __eq__(self, other):
        if not isinstance(other, EdgeLabeling):
            return NotImplemented
        return (
            self.graph is other.graph
            and self.bits == other.bits
            and self.p == other.p
            and self.pbar == other.pbar
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def left_target(self) -> int:
        """p * delta"""
        return int(self.p * self.graph.delta)

    @property
    def right_cap(self) -> int:
        """pbar * delta"""
        return int(self.pbar * self.graph.delta)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int64)

    def left_weights(self) -> np.ndarray:
        return self.as_array().reshape(self.graph.n, self.graph.delta).sum(axis=1)

    def right_weights(self) -> np.ndarray:
        return np.bincount(
            self.graph.right_endpoints, weights=self.as_array(), minlength=self.graph.n
        ).astype(np.int64)

    def excess(self) -> int:
        """Total overweight of the right side."""
        return int(np.maximum(self.right_weights() - self.right_cap, 0).sum())

    def with_bits(self, bits) -> EdgeLabeling:
        return replace(self, bits=tuple(int(b) for b in bits))

    def ones_in(self, edges) -> list[int]:
        return [e for e in edges if self.bits[e]]


@dataclass(frozen=True)
class ReversalStep:
    source: int
    sink: int
    path_length: int
    # Sizes of the right-vertex BFS layers reachable from the source.
    layer_sizes: tuple[int, ...]


@dataclass
class BalanceTrace:
    reversals: int = 0
    phases_max: int = 0
    initial_excess: int = 0
    steps: list[ReversalStep] = field(default_factory=list)


@dataclass(frozen=True)
class Violation:
    side: Side
    vertex: int
    weight: int
    bound: int


@dataclass(frozen=True)
class GoodReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def init_left_exact(
    g: BipartiteGraph, p: Rat, seed: int = 0, pbar: Rat | None = None
) -> EdgeLabeling:
    """p * delta random ones in every E(u); the right side is left alone."""
    p = as_fraction(p)
    pbar = p if pbar is None else as_fraction(pbar)

    weight = p * g.delta
    if weight.denominator != 1:
        raise NonIntegerWeight(f"p * delta = {weight} is not an integer")
    if not 0 <= weight <= g.delta:
        raise AssignmentError(f"p * delta = {weight} is outside 0..{g.delta}")

    rng = np.random.default_rng(seed)
    bits = np.zeros((g.n, g.delta), dtype=np.int64)
    for u in range(g.n):
        bits[u, rng.choice(g.delta, size=int(weight), replace=False)] = 1

    return EdgeLabeling(g, tuple(int(b) for b in bits.ravel()), p, pbar, seed)


def _arc_nodes(g: BipartiteGraph, e: int, bit: int) -> tuple[int, int]:
    u, v = g.edge(e)
    left, right = g.left_node(u), g.right_node(v)
    return (right, left) if bit else (left, right)


def directed_view(lab: EdgeLabeling) -> list[Arc]:
    g = lab.graph
    arcs = []
    for e, bit in enumerate(lab.bits):
        u, v = g.edge(e)
        left, right = Vertex(Side.LEFT, u), Vertex(Side.RIGHT, v)
        if bit:
            arcs.append(Arc(e, right, left, 1))
        else:
            arcs.append(Arc(e, left, right, 0))
    return arcs


def to_digraph(lab: EdgeLabeling) -> nx.MultiDiGraph:
    """The directed view as a networkx graph; node ids follow BipartiteGraph.to_networkx."""
    g = lab.graph
    digraph = nx.MultiDiGraph()
    digraph.add_nodes_from(range(2 * g.n))
    for e, bit in enumerate(lab.bits):
        tail, head = _arc_nodes(g, e, bit)
        digraph.add_edge(tail, head, key=e)
    return digraph


def _search(
    digraph: nx.MultiDiGraph, g: BipartiteGraph, source: int, sinks: set[int]
) -> list[int]:
    start = g.right_node(source)
    targets = {g.right_node(v) for v in sinks}
    parent: dict[int, tuple[int, int]] = {}

    for tail, head in nx.bfs_edges(digraph, start):
        parent[head] = (tail, min(digraph[tail][head]))
        if head in targets:
            path = []
            node = head
            while node != start:
                node, e = parent[node]
                path.append(e)
            return path[::-1]

    raise NoPathFound(f"No reversal path from right vertex {source}")


def _layer_sizes(digraph: nx.MultiDiGraph, g: BipartiteGraph, source: int) -> tuple[int, ...]:
    layers = nx.bfs_layers(digraph, [g.right_node(source)])
    return tuple(len(layer) for depth, layer in enumerate(layers) if depth % 2 == 0)


def find_reversal_path(
    lab: EdgeLabeling, source: int, digraph: nx.MultiDiGraph | None = None
) -> list[int]:
    """Shortest path of edge indices from an overweight right vertex to one with
    weight at most pbar * delta - 1."""
    weights = lab.right_weights()
    cap = lab.right_cap
    if weights[source] <= cap:
        raise AssignmentError(f"Right vertex {source} is not overweight")

    sinks = {int(v) for v in np.flatnonzero(weights <= cap - 1)}
    if not sinks:
        raise NoPathFound("No right vertex has room for another one")

    return _search(digraph if digraph is not None else to_digraph(lab), lab.graph, source, sinks)


def _check_path(lab: EdgeLabeling, path: list[int]):
    g = lab.graph
    if not path or len(path) % 2:
        raise MalformedPath(f"Reversal paths have positive even length, got {len(path)}")
    if len(set(path)) != len(path):
        raise MalformedPath("Reversal path repeats an edge")
    if any(not 0 <= e < g.num_edges for e in path):
        raise MalformedPath("Reversal path has an edge out of range")

    for i, e in enumerate(path):
        if lab.bits[e] != (1 if i % 2 == 0 else 0):
            raise MalformedPath(f"Edge {e} at step {i} has the wrong bit")
        if i == 0:
            continue

        (u0, v0), (u1, v1) = g.edge(path[i - 1]), g.edge(e)
        # Odd steps continue from a left vertex, even steps from a right one.
        if (i % 2 and u0 != u1) or (i % 2 == 0 and v0 != v1):
            raise MalformedPath(f"Edges {path[i - 1]} and {e} do not meet")


def reverse_path(lab: EdgeLabeling, path: list[int]) -> EdgeLabeling:
    _check_path(lab, path)
    bits = list(lab.bits)
    for e in path:
        bits[e] ^= 1
    return lab.with_bits(bits)


def balance(lab: EdgeLabeling) -> tuple[EdgeLabeling, BalanceTrace]:
    if lab.p > lab.pbar:
        raise AssignmentError(f"Need p <= pbar, got p={lab.p}, pbar={lab.pbar}")

    g = lab.graph
    cap = lab.right_cap
    target = lab.left_target
    checks = get_preferences().balance_checks

    bits = lab.as_array()
    right = lab.right_weights()
    trace = BalanceTrace(initial_excess=lab.excess())
    digraph = to_digraph(lab)

    while (over := np.flatnonzero(right > cap)).size:
        if trace.reversals >= g.num_edges:
            raise InvariantViolation(f"More than {g.num_edges} reversals")

        source = int(over[0])
        sinks = {int(v) for v in np.flatnonzero(right <= cap - 1)}
        if not sinks:
            raise NoPathFound("No right vertex has room for another one")

        path = _search(digraph, g, source, sinks)
        sink = int(g.edge(path[-1])[1])
        layer_sizes = _layer_sizes(digraph, g, source)

        for e in path:
            tail, head = _arc_nodes(g, e, int(bits[e]))
            digraph.remove_edge(tail, head, key=e)
            digraph.add_edge(head, tail, key=e)
            bits[e] ^= 1

        right[source] -= 1
        right[sink] += 1

        if checks:
            left = bits.reshape(g.n, g.delta).sum(axis=1)
            if (bad := np.flatnonzero(left != target)).size:
                raise InvariantViolation(f"Left vertex {int(bad[0])} lost its weight")
            if right[sink] > cap:
                raise InvariantViolation(f"Sink {sink} went over the cap")

        step = ReversalStep(source, sink, len(path), layer_sizes)
        trace.steps.append(step)
        trace.reversals += 1
        trace.phases_max = max(trace.phases_max, len(path) // 2)
        debug_print(f"reversal {trace.reversals}: v{source} -> v{sink}, {len(path)} edges")

    if trace.reversals != trace.initial_excess:
        raise InvariantViolation(
            f"{trace.reversals} reversals for an excess of {trace.initial_excess}"
        )

    return lab.with_bits(bits), trace


def verify_good(lab: EdgeLabeling) -> GoodReport:
    violations = [
        Violation(Side.LEFT, u, int(w), lab.left_target)
        for u, w in enumerate(lab.left_weights())
        if w != lab.left_target
    ]
    violations += [
        Violation(Side.RIGHT, v, int(w), lab.right_cap)
        for v, w in enumerate(lab.right_weights())
        if w > lab.right_cap
    ]
    return GoodReport(tuple(violations))


def require_good(lab: EdgeLabeling):
    report = verify_good(lab)
    if not report.ok:
        first = report.violations[0]
        raise NotGood(
            f"{len(report.violations)} violations, first at {first.side} vertex "
            f"{first.vertex} with weight {first.weight} (bound {first.bound})"
        )


def assignment_to_dict(lab: EdgeLabeling) -> dict[str, object]:
    return {
        "p": format_fraction(lab.p),
        "pbar": format_fraction(lab.pbar),
        "seed": lab.seed,
        "bits": "".join(str(b) for b in lab.bits),
    }


def assignment_from_dict(data: dict, g: BipartiteGraph) -> EdgeLabeling:
    try:
        bits = tuple(int(c) for c in data["bits"])
        p = as_fraction(data["p"])
        pbar = as_fraction(data["pbar"])
        seed = data.get("seed")
    except (KeyError, TypeError, ValueError) as ex:
        raise AssignmentError(f"Malformed assignment record: {ex}") from ex

    return EdgeLabeling(g, bits, p, pbar, seed)


def save_assignment(lab: EdgeLabeling, path: Path):
    Path(path).write_text(json.dumps(assignment_to_dict(lab)) + "\n", encoding="utf-8")


def load_assignment(path: Path, g: BipartiteGraph) -> EdgeLabeling:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as ex:
        raise AssignmentError(f"Could not read assignment {path}: {ex}") from ex

    return assignment_from_dict(data, g)
