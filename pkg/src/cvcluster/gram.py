"""Cluster-type circuits from real vectors (the vector formalism).

A cluster-type interferometer has ``Im U = Adj Re U``; writing
``alpha = Re U`` (row ``k`` is the vector attached to vertex ``k``) makes
``U = alpha + i Adj alpha``. Unitarity then pins the inner products of
the vectors: ``alpha alpha^T = (I + Adj^2)^{-1}``. Any real factor of that
Gram matrix gives a valid circuit.

Inner products are used throughout. Where the literature writes
``||alpha||`` for these circuits it means the squared length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import FactorizationError, NonUnitaryError
from .gaussian import check_unitary, unitarity_residual
from .graph import Graph, chain, cluster_condition_residuals, diamond, sixmode
from .synthesis import SynthesisResult, offline_circuit

GRAM_TOL = 1e-9
ACCEPT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GramMatrix:
    G: np.ndarray
    graph: Graph

    def identity_residuals(self):
        """``(max|G Adj - Adj G|, max|G + Adj G Adj - I|)``."""
        A = self.graph.adjacency
        G = self.G
        return (
            float(np.abs(G @ A - A @ G).max()),
            float(np.abs(G + A @ G @ A - np.eye(len(G))).max()),
        )


@dataclass(frozen=True, eq=False)
class AlphaMatrix:
    alpha: np.ndarray
    name: Optional[str] = None

    def gram_residual(self, gram: GramMatrix) -> float:
        return float(np.abs(self.alpha @ self.alpha.T - gram.G).max())


def derive_gram(g: Graph) -> GramMatrix:
    A = g.adjacency
    G = np.linalg.inv(np.eye(g.n) + A @ A)
    return GramMatrix(0.5 * (G + G.T), g)


def triangular_factor(G) -> np.ndarray:
    """Row-by-row construction of lower-triangular ``alpha`` with ``alpha alpha^T = G``.

    Vector ``k`` is fixed by its overlaps with vectors ``0..k-1`` (which
    determine its first ``k`` components) and its own squared length (which
    determines the positive ``k``-th component).

    Raises:
        FactorizationError: if ``G`` is not positive definite.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    alpha = np.zeros((n, n))
    for k in range(n):
        for j in range(k):
            alpha[k, j] = (G[k, j] - alpha[k, :j] @ alpha[j, :j]) / alpha[j, j]
        pivot = G[k, k] - alpha[k, :k] @ alpha[k, :k]
        if pivot <= 0:
            raise FactorizationError(k + 1, pivot)
        alpha[k, k] = np.sqrt(pivot)
    return alpha


_s = np.sqrt

# Hand-picked vector solutions; rows are vertices 1..n, columns input modes.
PAPER_ALPHAS = {
    "twomode": np.eye(2) / _s(2),
    "chain4": np.array(
        [
            [1 / _s(2), 1 / _s(10), 0, 0],
            [0, 0, -2 / _s(10), 0],
            [0, -2 / _s(10), 0, 0],
            [0, 0, 1 / _s(10), -1 / _s(2)],
        ]
    ),
    "diamond": np.array(
        [
            [1 / _s(3), -2 / _s(15), 0, 0],
            [0, 0, 1 / _s(3), -2 / _s(15)],
            [0, 0, 0, _s(3 / 5)],
            [0, _s(3 / 5), 0, 0],
        ]
    ),
    "sixmode": np.array(
        [
            [1 / _s(5), 1 / _s(2), 0, 0, 0, 0],
            [0, 0, 0, -1 / _s(20), 0, 1 / 2],
            [1 / _s(5), -1 / _s(2), 0, 0, 0, 0],
            [0, 0, 0, 1 / _s(5), 1 / _s(2), 0],
            [-1 / _s(20), 0, 1 / 2, 0, 0, 0],
            [0, 0, 0, 1 / _s(5), -1 / _s(2), 0],
        ]
    ),
}

PAPER_GRAPHS = {
    "twomode": lambda: chain(2),
    "chain4": lambda: chain(4),
    "diamond": diamond,
    "sixmode": sixmode,
}


def paper_fixture(name: str):
    """``(graph, AlphaMatrix)`` for ``twomode``, ``chain4``, ``diamond`` or ``sixmode``.

    A ``paper:`` prefix is accepted.
    """
    key = name.split(":", 1)[1] if name.startswith("paper:") else name
    if key not in PAPER_ALPHAS:
        raise KeyError(f"no vector fixture named {name!r}; have {sorted(PAPER_ALPHAS)}")
    return PAPER_GRAPHS[key](), AlphaMatrix(PAPER_ALPHAS[key].copy(), f"paper:{key}")


def factor_gram(gram: GramMatrix, strategy: str = "recursive") -> AlphaMatrix:
    """Real vectors whose Gram matrix is ``gram``.

    ``"recursive"`` gives the triangular construction; ``"paper:<name>"``
    (or ``"reproduce_paper:<name>"``) returns a stored hand-picked solution,
    checked against ``gram``.
    """
    if strategy == "recursive":
        return AlphaMatrix(triangular_factor(gram.G), "recursive")
    name = strategy.split(":", 1)[-1]
    graph, alpha = paper_fixture(name)
    if graph != gram.graph:
        raise ValueError(f"fixture {name!r} is for {graph}, not {gram.graph}")
    res = alpha.gram_residual(gram)
    if res > GRAM_TOL:
        raise ValueError(f"fixture {name!r} misses the Gram matrix by {res:.3e}")
    return alpha


def assemble_unitary(g: Graph, alpha, tol: float = GRAM_TOL) -> np.ndarray:
    """``U = alpha + i Adj alpha``; rejects vectors with the wrong Gram matrix.

    Raises:
        NonUnitaryError: if the resulting ``U`` is not unitary within ``tol``.
    """
    a = alpha.alpha if isinstance(alpha, AlphaMatrix) else np.asarray(alpha, dtype=float)
    if a.shape != (g.n, g.n):
        raise ValueError(f"alpha has shape {a.shape}, graph has {g.n} vertices")
    U = a + 1j * (g.adjacency @ a)
    res = unitarity_residual(U)
    if res > tol:
        raise NonUnitaryError(res, tol)
    return U


@dataclass(frozen=True)
class ClusterDiagnostics:
    residuals: np.ndarray

    @property
    def max(self) -> float:
        return float(self.residuals.max())

    @property
    def per_vertex(self) -> np.ndarray:
        return self.residuals.max(axis=1)

    @property
    def ok(self) -> bool:
        return self.max <= ACCEPT_TOL


def check_cluster_conditions(U, g: Graph) -> ClusterDiagnostics:
    return ClusterDiagnostics(cluster_condition_residuals(U, g))


def synthesize_gram(
    g: Graph,
    R,
    strategy: str = "recursive",
    perm: Optional[Sequence[int]] = None,
) -> SynthesisResult:
    """Cluster-type circuit for ``g`` fed by momentum squeezers ``R``.

    ``perm`` reorders the columns of ``U`` (column ``l`` of the result is
    column ``perm[l]`` of the factor) so strong squeezers can be paired with
    the columns that carry most weight.
    """
    alpha = factor_gram(derive_gram(g), strategy).alpha
    if perm is not None:
        perm = list(perm)
        if sorted(perm) != list(range(g.n)):
            raise ValueError(f"{perm} is not a permutation of 0..{g.n - 1}")
        alpha = alpha[:, perm]
    U = check_unitary(assemble_unitary(g, alpha))
    prov = {"method": "gram", "strategy": strategy, "graph": g.to_json(), "alpha": alpha.tolist()}
    if perm is not None:
        prov["perm"] = [p + 1 for p in perm]
    return offline_circuit(U, R, prov)
