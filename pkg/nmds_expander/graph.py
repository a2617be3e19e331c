"""
Delta-regular bipartite graphs with a fixed vertex and edge ordering.

Left vertices u and right vertices v are both numbered 0..n-1. adjacency[u]
lists the right neighbours of u; the edge at position pos of that list has
global index u * delta + pos. E(u) is therefore a contiguous block of edge
indices, and E(v) is the ascending list of edge indices ending at v.

Parallel edges are allowed and are distinct edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from pathlib import Path

import networkx as nx
import numpy as np

from .debug import debug_print
from .errors import NmdsError

EIGEN_TOLERANCE = 1e-9
CONNECT_ATTEMPTS = 100


class GraphError(NmdsError):
    """Raised when a graph cannot be built or loaded."""


class BadParameters(GraphError):
    """Raised when (kind, n, delta) does not describe a buildable graph."""


class ConnectivityFailure(GraphError):
    """Raised when no connected random graph was drawn within the retry budget."""


class GraphKind(StrEnum):
    COMPLETE = "complete"
    CYCLE = "cycle"
    RANDOM_REGULAR = "random_regular"


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    n: int
    delta: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1 or self.delta < 1:
            raise BadParameters(f"Need n, delta >= 1, got n={self.n}, delta={self.delta}")
        if len(self.adjacency) != self.n:
            raise BadParameters(f"Expected {self.n} adjacency lists, got {len(self.adjacency)}")

        degrees = [0] * self.n
        for u, neighbours in enumerate(self.adjacency):
            if len(neighbours) != self.delta:
                raise BadParameters(f"Left vertex {u} has degree {len(neighbours)}")
            for v in neighbours:
                if not 0 <= v < self.n:
                    raise BadParameters(f"Left vertex {u} has neighbour {v} out of range")
                degrees[v] += 1

        for v, degree in enumerate(degrees):
            if degree != self.delta:
                raise BadParameters(f"Right vertex {v} has degree {degree}")

    def __repr__(self):
        return f"BipartiteGraph(n={self.n}, delta={self.delta})"

    @property
    def num_edges(self) -> int:
        return self.n * self.delta

    def edge(self, index: int) -> tuple[int, int]:
        """(u, v) for a global edge index."""
        u, pos = divmod(index, self.delta)
        return u, self.adjacency[u][pos]

    def edge_index(self, u: int, pos: int) -> int:
        return u * self.delta + pos

    @cached_property
    def left_endpoints(self) -> np.ndarray:
        ends = np.repeat(np.arange(self.n), self.delta)
        ends.setflags(write=False)
        return ends

    @cached_property
    def right_endpoints(self) -> np.ndarray:
        ends = np.array([v for row in self.adjacency for v in row], dtype=np.int64)
        ends.setflags(write=False)
        return ends

    @cached_property
    def left_edges(self) -> tuple[tuple[int, ...], ...]:
        """E(u) for every left vertex."""
        d = self.delta
        return tuple(tuple(range(u * d, (u + 1) * d)) for u in range(self.n))

    @cached_property
    def right_edges(self) -> tuple[tuple[int, ...], ...]:
        """E(v) for every right vertex, ascending."""
        lists: list[list[int]] = [[] for _ in range(self.n)]
        for e, v in enumerate(self.right_endpoints):
            lists[int(v)].append(e)
        return tuple(tuple(edges) for edges in lists)

    @cached_property
    def right_position(self) -> np.ndarray:
        """Position of every edge inside its E(v)."""
        pos = np.zeros(self.num_edges, dtype=np.int64)
        for edges in self.right_edges:
            pos[list(edges)] = np.arange(len(edges))
        pos.setflags(write=False)
        return pos

    def left_node(self, u: int) -> int:
        return u

    def right_node(self, v: int) -> int:
        return self.n + v

    def to_networkx(self) -> nx.MultiGraph:
        """Left vertices are nodes 0..n-1, right vertices n..2n-1; keys are edge indices."""
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n), bipartite=0)
        g.add_nodes_from(range(self.n, 2 * self.n), bipartite=1)
        for e in range(self.num_edges):
            u, v = self.edge(e)
            g.add_edge(self.left_node(u), self.right_node(v), key=e)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def adjacency_matrix(self) -> np.ndarray:
        n = self.n
        a = np.zeros((2 * n, 2 * n))
        np.add.at(a, (self.left_endpoints, n + self.right_endpoints), 1.0)
        return a + a.T

    def to_dict(self) -> dict[str, object]:
        return {"n": self.n, "delta": self.delta, "adj": [list(row) for row in self.adjacency]}


@dataclass(frozen=True)
class SpectralInfo:
    lambda1: float
    lambda2: float
    gamma: float
    eigenvalues: tuple[float, ...]


def edge_views(g: BipartiteGraph) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """(E(u) for every u, E(v) for every v)."""
    return g.left_edges, g.right_edges


def _complete(n: int, delta: int) -> list[list[int]]:
    if delta != n:
        raise BadParameters(f"complete needs delta = n, got n={n}, delta={delta}")
    return [list(range(n)) for _ in range(n)]


def _cycle(n: int, delta: int) -> list[list[int]]:
    if delta != 2 or n < 2:
        raise BadParameters(f"cycle needs delta = 2 and n >= 2, got n={n}, delta={delta}")
    return [[u, (u + 1) % n] for u in range(n)]


def _random_matchings(n: int, delta: int, rng: np.random.Generator) -> list[list[int]]:
    """Union of delta random perfect matchings."""
    rounds = [rng.permutation(n) for _ in range(delta)]
    return [[int(perm[u]) for perm in rounds] for u in range(n)]


def _random_cycle(n: int, rng: np.random.Generator) -> list[list[int]]:
    """Two matchings conditioned on forming one 2n-cycle.

    Two random matchings are connected only when the second is the first
    composed with a single n-cycle, which happens with probability 1/n. This
    draws that conditional law directly.
    """
    first = rng.permutation(n)
    order = rng.permutation(n)
    successor = np.empty(n, dtype=np.int64)
    successor[order] = np.roll(order, -1)
    return [[int(first[u]), int(first[successor[u]])] for u in range(n)]


def build_graph(kind: GraphKind | str, n: int, delta: int, seed: int = 0) -> BipartiteGraph:
    if n < 1 or delta < 1:
        raise BadParameters(f"Need n, delta >= 1, got n={n}, delta={delta}")

    try:
        kind = GraphKind(kind)
    except ValueError as ex:
        raise BadParameters(f"Unknown graph kind {kind!r}") from ex

    match kind:
        case GraphKind.COMPLETE:
            return BipartiteGraph(n, delta, _freeze(_complete(n, delta)))
        case GraphKind.CYCLE:
            return BipartiteGraph(n, delta, _freeze(_cycle(n, delta)))

    rng = np.random.default_rng(seed)
    for attempt in range(CONNECT_ATTEMPTS):
        if delta == 2:
            adjacency = _random_cycle(n, rng)
        else:
            adjacency = _random_matchings(n, delta, rng)

        g = BipartiteGraph(n, delta, _freeze(adjacency))
        if g.is_connected():
            debug_print(f"random_regular n={n} delta={delta} seed={seed}: attempt {attempt + 1}")
            return g

    raise ConnectivityFailure(
        f"No connected {delta}-regular graph on {n}+{n} vertices in {CONNECT_ATTEMPTS} draws"
    )


def _freeze(adjacency: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in adjacency)


def gamma(g: BipartiteGraph) -> SpectralInfo:
    """Second largest over largest adjacency eigenvalue (signed)."""
    values = np.sort(np.linalg.eigvalsh(g.adjacency_matrix()))[::-1]
    lambda1 = float(values[0])
    lambda2 = float(values[1])
    if abs(lambda2) < EIGEN_TOLERANCE:
        lambda2 = 0.0

    return SpectralInfo(
        lambda1=lambda1,
        lambda2=lambda2,
        gamma=lambda2 / lambda1,
        eigenvalues=tuple(float(x) for x in values),
    )


def ramanujan_bound(delta: int) -> float:
    return 2 * math.sqrt(delta - 1)


def ramanujan_gamma_bound(delta: int) -> float:
    """gamma of a Ramanujan graph is at most 2 sqrt(delta - 1) / delta."""
    return ramanujan_bound(delta) / delta


def is_ramanujan(g: BipartiteGraph) -> bool:
    return gamma(g).lambda2 <= ramanujan_bound(g.delta) + EIGEN_TOLERANCE


def graph_from_dict(data: dict) -> BipartiteGraph:
    try:
        n = int(data["n"])
        delta = int(data["delta"])
        adjacency = _freeze(data["adj"])
    except (KeyError, TypeError, ValueError) as ex:
        raise GraphError(f"Malformed graph record: {ex}") from ex

    return BipartiteGraph(n, delta, adjacency)


def save_graph(g: BipartiteGraph, path: Path):
    Path(path).write_text(json.dumps(g.to_dict()) + "\n", encoding="utf-8")


def load_graph(path: Path) -> BipartiteGraph:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as ex:
        raise GraphError(f"Could not read graph {path}: {ex}") from ex

    return graph_from_dict(data)
