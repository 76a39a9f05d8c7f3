"""Graphs, nullifiers and the closed-form excess noise of cluster-type states.

Vertices are 0-based in the Python API. JSON files and printed reports
use 1-based labels so that paper-style examples ("modes 1 through 3")
read naturally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence

import numpy as np

from .errors import InvalidCircuitError
from .gaussian import GaussianState, nullifier_variance

CLUSTER_CONDITION_TOL = 1e-6


class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = int(n)
        es = set()
        for e in edges:
            a, b = (int(v) for v in e)
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) out of range for {n} vertices")
            key = (min(a, b), max(a, b))
            if key in es:
                raise ValueError(f"duplicate edge {key}")
            es.add(key)
        self.edges = frozenset(es)
        adj = np.zeros((n, n))
        for a, b in es:
            adj[a, b] = adj[b, a] = 1.0
        adj.setflags(write=False)
        self._adj = adj
        self._nbrs = tuple(tuple(np.flatnonzero(adj[a]).tolist()) for a in range(n))

    @classmethod
    def from_one_based(cls, n: int, edges) -> "Graph":
        return cls(n, [(a - 1, b - 1) for a, b in edges])

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    def neighbors(self, a: int) -> tuple:
        return self._nbrs[a]

    def degree(self, a: int) -> int:
        return len(self._nbrs[a])

    def sorted_edges(self) -> List[tuple]:
        return sorted(self.edges)

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            for b in self._nbrs[stack.pop()]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return len(seen) == self.n

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``a`` renamed ``perm[a]``."""
        return Graph(self.n, [(perm[a], perm[b]) for a, b in self.edges])

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[a + 1, b + 1] for a, b in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        return cls.from_one_based(int(data["n"]), data["edges"])

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={[(a + 1, b + 1) for a, b in self.sorted_edges()]})"


# --- named graphs ------------------------------------------------------------


def chain(n: int) -> Graph:
    return Graph(n, [(a, a + 1) for a in range(n - 1)])


def diamond() -> Graph:
    return Graph.from_one_based(4, [(1, 2), (1, 3), (2, 4), (3, 4)])


def multirail(m: int) -> Graph:
    """Input node 1, ``m`` middle nodes, output node ``m + 2``."""
    if m < 1:
        raise ValueError("need at least one rail")
    out = m + 1
    edges = [(0, i) for i in range(1, m + 1)] + [(i, out) for i in range(1, m + 1)]
    return Graph(m + 2, edges)


def sixmode() -> Graph:
    # Unique 6-vertex graph whose Gram matrix has the two-block structure
    # quoted for the nonlinear 6-mode cluster (checked by exhaustive search).
    return Graph.from_one_based(6, [(1, 2), (2, 3), (2, 5), (4, 5), (5, 6)])


def edgeless(n: int) -> Graph:
    return Graph(n)


def named_graph(name: str) -> Graph:
    """Resolve ``chain:n``, ``diamond``, ``multirail:m``, ``edgeless:n``,
    ``chain3`` and the ``paper:*`` aliases."""
    key = name.strip().lower()
    aliases = {
        "paper:twomode": "chain:2",
        "paper:chain4": "chain:4",
        "paper:diamond": "diamond",
        "chain3": "chain:3",
        "twomode": "chain:2",
    }
    key = aliases.get(key, key)
    if key in ("diamond",):
        return diamond()
    if key in ("paper:sixmode", "sixmode"):
        return sixmode()
    kind, _, arg = key.partition(":")
    builders = {"chain": chain, "multirail": multirail, "edgeless": edgeless}
    if kind in builders and arg:
        try:
            k = int(arg)
        except ValueError:
            raise ValueError(f"bad graph size in {name!r}") from None
        return builders[kind](k)
    raise ValueError(f"unknown graph {name!r}")


def enumerate_graphs(n: int, connected: bool = True) -> Iterator[Graph]:
    """All labeled graphs on ``n`` vertices (optionally only connected ones)."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        g = Graph(n, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if not connected or g.is_connected():
            yield g


# --- nullifiers -----------------------------------------------------------------


@dataclass(frozen=True)
class Nullifier:
    """``p_a - sum_{b in N_a} x_b`` as a coefficient vector over (x1, p1, ...)."""

    vertex: int
    coeffs: np.ndarray


def nullifiers(g: Graph) -> List[Nullifier]:
    out = []
    for a in range(g.n):
        c = np.zeros(2 * g.n)
        c[2 * a + 1] = 1.0
        for b in g.neighbors(a):
            c[2 * b] = -1.0
        out.append(Nullifier(a, c))
    return out


@dataclass(frozen=True)
class NullifierReport:
    """Per-vertex nullifier variances in vacuum units."""

    variances: np.ndarray

    @property
    def max(self) -> float:
        return float(np.max(self.variances))

    @property
    def mean(self) -> float:
        return float(np.mean(self.variances))

    def to_json(self) -> dict:
        return {str(a + 1): float(v) for a, v in enumerate(self.variances)}


def measure_nullifiers(g: Graph, state: GaussianState) -> NullifierReport:
    if state.n_modes != g.n:
        raise ValueError(f"state has {state.n_modes} modes, graph has {g.n} vertices")
    return NullifierReport(np.array([nullifier_variance(state, nl.coeffs) for nl in nullifiers(g)]))


def cluster_condition_residuals(U, g: Graph) -> np.ndarray:
    """``|Im U_al - sum_{b in N_a} Re U_bl|`` for every ``(a, l)``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (g.n, g.n):
        raise ValueError(f"{U.shape} matrix for a {g.n}-vertex graph")
    return np.abs(U.imag - g.adjacency @ U.real)


def excess_noise(g: Graph, U, R, tol: float = CLUSTER_CONDITION_TOL) -> np.ndarray:
    """Closed-form nullifier excess noise of a cluster-type circuit.

    Input mode ``l`` is momentum-squeezed by ``R[l]`` and fed into column
    ``l`` of ``U``. For each vertex ``a`` returns, in vacuum units,

        sum_l [Re U_al (1 + M_a) + sum_{b in N_a} sum_{k in N_b, k != a} Re U_kl]^2 e^{-2 R_l}

    with repeated second neighbours counted once per path.

    Raises:
        InvalidCircuitError: if ``U`` violates ``Im U = Adj Re U`` by more than ``tol``.
    """
    U = np.asarray(U, dtype=complex)
    R = np.broadcast_to(np.asarray(R, dtype=float), (g.n,))
    res = cluster_condition_residuals(U, g)
    if res.max() > tol:
        raise InvalidCircuitError(
            f"circuit violates the cluster-type condition (max residual {res.max():.3e})",
            residuals=res.max(axis=1),
        )
    re = U.real
    weights = np.exp(-2.0 * R)
    out = np.empty(g.n)
    for a in range(g.n):
        coef = re[a] * (1 + g.degree(a))
        for b in g.neighbors(a):
            for k in g.neighbors(b):
                if k != a:
                    coef = coef + re[k]
        out[a] = np.sum(coef**2 * weights)
    return out
