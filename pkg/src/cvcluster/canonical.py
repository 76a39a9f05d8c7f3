"""Canonical cluster states: QND network and its exact linear-optics replacement.

The canonical state momentum-squeezes every vacuum mode by ``r`` and then
applies a unit-gain CZ gate per edge. Its Heisenberg action on the vacuum
annihilation operators is the Bogoliubov map ``a' = A a + B a^dag``,
which is decomposed as ``A = U A_D V^dag``, ``B = U B_D V^T``. Since ``V``
acts on vacuum, the state equals squeezers ``R_l`` followed by ``U``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DecompositionError
from .gaussian import GaussianState, apply_all, qnd_cz, squeeze, squeezing_to_db, vacuum
from .graph import Graph
from .linalg import takagi
from .synthesis import SynthesisResult

RESIDUAL_TOL = 1e-8


def qnd_network_state(g: Graph, r: float) -> GaussianState:
    """Squeeze each mode by ``r`` (momentum), then CZ every edge."""
    if r < 0:
        raise ValueError("canonical squeezing must be non-negative")
    ops = [squeeze(a, r) for a in range(g.n)]
    ops += [qnd_cz(a, b) for a, b in g.sorted_edges()]
    return apply_all(vacuum(g.n), ops)


@dataclass(frozen=True, eq=False)
class CanonicalLubo:
    A: np.ndarray
    B: np.ndarray
    r: float
    graph: Optional[Graph] = None

    def bogoliubov_residuals(self):
        """``(max|AA^dag - BB^dag - I|, max|AB^T - BA^T|)``."""
        A, B = self.A, self.B
        n = A.shape[0]
        r1 = np.abs(A @ A.conj().T - B @ B.conj().T - np.eye(n)).max()
        r2 = np.abs(A @ B.T - B @ A.T).max()
        return float(r1), float(r2)


def canonical_lubo(g: Graph, r: float) -> CanonicalLubo:
    if r < 0:
        raise ValueError("canonical squeezing must be non-negative")
    off = 0.5j * np.exp(r) * g.adjacency
    A = np.cosh(r) * np.eye(g.n) + off
    B = np.sinh(r) * np.eye(g.n) + off
    return CanonicalLubo(A, B, float(r), g)


def _lambda_b(d):
    # root of lB (1 + lB) = d^2, written to avoid cancellation for small d
    d2 = np.asarray(d, dtype=float) ** 2
    return 2.0 * d2 / (1.0 + np.sqrt(1.0 + 4.0 * d2))


def decompose_canonical(lubo: CanonicalLubo, tol: float = RESIDUAL_TOL) -> SynthesisResult:
    """Bloch-Messiah decomposition of the canonical Bogoliubov map.

    ``U`` comes from the Takagi factorization of ``A B^T = U (A_D B_D) U^T``;
    the singular values of ``A`` and ``B`` follow from ``lambdaA - lambdaB = 1``.

    Raises:
        DecompositionError: if ``A = U A_D V^dag`` or ``B = U B_D V^T`` fails by more than ``tol``.
    """
    A, B = lubo.A, lubo.B
    U, d = takagi(A @ B.T)
    lamB = _lambda_b(d)
    lamA = 1.0 + lamB
    sA, sB = np.sqrt(lamA), np.sqrt(lamB)
    V = (A.conj().T @ U) / sA
    res = max(
        np.abs(A - (U * sA) @ V.conj().T).max(),
        np.abs(B - (U * sB) @ V.T).max(),
    )
    scale = max(1.0, float(np.abs(A).max()))
    if res > tol * scale:
        raise DecompositionError(
            f"canonical decomposition failed: residual {res:.3e}", residual=float(res)
        )
    prov = {"method": "canonical", "r": lubo.r}
    if lubo.graph is not None:
        prov["graph"] = lubo.graph.to_json()
    return SynthesisResult(U, np.log(sA + sB), lamA, lamB, prov, V)


def synthesize_canonical(g: Graph, r: float) -> SynthesisResult:
    return decompose_canonical(canonical_lubo(g, r))


@dataclass(frozen=True)
class CanonicalDiagnostics:
    """Residuals of the two linear conditions a canonical ``U`` must satisfy.

    ``eq3[a, l] = Im U_al - C_l sum_{b in N_a} Re U_bl`` and
    ``eq4[a, l] = Re U_al (D_l - M_a) - sum_{b in N_a} sum_{k in N_b, k != a} Re U_kl``.
    Where ``C_l`` is infinite (``lambdaB = 0`` at ``r = 0``) the first
    condition is checked multiplied through by its denominator.
    """

    eq3: np.ndarray
    eq4: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def eq3_max(self) -> float:
        return float(np.abs(self.eq3).max())

    @property
    def eq4_max(self) -> float:
        return float(np.abs(self.eq4).max())

    @property
    def ok(self) -> bool:
        return self.eq3_max <= RESIDUAL_TOL and self.eq4_max <= RESIDUAL_TOL


def check_canonical_conditions(result: SynthesisResult, g: Graph, r: float) -> CanonicalDiagnostics:
    U = result.U
    lamA, lamB = result.lambdaA, result.lambdaB
    sA, sB = np.sqrt(lamA), np.sqrt(lamB)
    num = 0.5 * np.exp(r) * (sA + sB)
    den = sA * np.sinh(r) + sB * np.cosh(r)
    finite = den > 1e-12
    C = np.full_like(num, np.inf)
    C[finite] = num[finite] / den[finite]
    # lambdaA - lambdaB = 1 turns the numerator into lambdaB - sinh^2 r,
    # which stays accurate when both terms are ~e^{2r}.
    D = (lamB - np.sinh(r) ** 2) / (np.exp(2 * r) / 4)

    nbr_re = g.adjacency @ U.real
    eq3 = np.where(finite, U.imag - np.where(finite, C, 0.0) * nbr_re, den * U.imag - num * nbr_re)

    re = U.real
    eq4 = np.empty_like(re)
    for a in range(g.n):
        second = np.zeros(g.n)
        for b in g.neighbors(a):
            for k in g.neighbors(b):
                if k != a:
                    second += re[k]
        eq4[a] = re[a] * (D - g.degree(a)) - second
    return CanonicalDiagnostics(eq3, eq4, C, D)


@dataclass(frozen=True)
class SqueezingBudget:
    nats: np.ndarray
    db: np.ndarray

    @property
    def total_db(self) -> float:
        return float(self.db.sum())

    @property
    def max_db(self) -> float:
        return float(self.db.max()) if self.db.size else 0.0


def squeezing_budget(result: SynthesisResult) -> SqueezingBudget:
    return SqueezingBudget(result.R.copy(), squeezing_to_db(result.R))


def uniform_cluster_squeezing(g: Graph, max_excess: float) -> float:
    """Uniform input squeezing a cluster-type circuit needs to reach ``max_excess``.

    With every ``R_l = R`` the closed-form excess noise of vertex ``a`` is
    ``(1 + M_a) e^{-2R}`` for any valid circuit, so the worst vertex sets ``R``.
    Use ``max_excess = exp(-2 r)`` to match a canonical state built with ``r``.
    """
    if max_excess <= 0:
        raise ValueError("target excess noise must be positive")
    top = max(g.degree(a) for a in range(g.n))
    return 0.5 * float(np.log((1 + top) / max_excess))
