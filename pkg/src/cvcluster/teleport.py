"""Teleportation of a coherent input through chain, diamond and multiple-rail clusters.

The input mode is CZ-coupled to cluster node 1, then ``p`` is measured on
the input and on every cluster node except the output node. The output
is fixed up by ``F^dag X(-s_in) F^dag X(-s_1) F^dag X(-mean(s_rails))``
(rightmost first). Cluster states come from cluster-type circuits whose
two columns carrying the input and output node vectors are squeezed by
``r_high``; each rail column gets its own finite squeezing.

Two noise figures are reported. The *output* covariance is what the
feedforward-corrected mode carries when outcomes are not known. It equals
the conditional covariance plus the spread of the corrected mean over
outcomes. The *conditional* covariance is the Bayes posterior for one known
set of outcomes; it can sit below the vacuum level and is not a channel noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ProtocolError
from .gaussian import (
    VACUUM_VARIANCE,
    GaussianState,
    _rng,
    apply,
    apply_interferometer,
    coherent,
    condition_p,
    interferometer_symplectic,
    displace,
    fourier_inverse,
    qnd_cz,
    squeeze,
)
from .graph import Graph, chain, diamond, multirail
from .gram import assemble_unitary, derive_gram, paper_fixture, triangular_factor

R_HIGH_DEFAULT = 12.0


@dataclass(frozen=True)
class ProtocolSpec:
    """Teleportation setup.

    ``squeeze`` gives the rail columns' squeezing in nats (a scalar, or one
    value per rail). ``vectors`` picks the cluster circuit: ``"recursive"``
    (triangular factor with the input/output node vectors in columns 1-2)
    or ``"paper"`` (stored diamond vectors, diamond only).
    """

    cluster: str = "diamond"
    squeeze: object = 1.0
    r_high: float = R_HIGH_DEFAULT
    input_mean: tuple = (0.0, 0.0)
    seed: int = 0
    vectors: str = "recursive"

    @property
    def m(self) -> int:
        key = self.cluster.lower()
        if key == "chain3":
            return 1
        if key == "diamond":
            return 2
        if key.startswith("multirail:"):
            try:
                m = int(key.split(":", 1)[1])
            except ValueError:
                raise ProtocolError(f"bad rail count in {self.cluster!r}") from None
            if m < 1:
                raise ProtocolError("need at least one rail")
            return m
        raise ProtocolError(f"unknown cluster {self.cluster!r}")

    @property
    def graph(self) -> Graph:
        m = self.m
        if self.cluster.lower() == "chain3":
            return chain(3)
        if self.cluster.lower() == "diamond":
            return diamond()
        return multirail(m)

    def rail_squeezing(self) -> np.ndarray:
        sq = np.atleast_1d(np.asarray(self.squeeze, dtype=float))
        if sq.size == 1:
            sq = np.full(self.m, sq[0])
        if sq.shape != (self.m,):
            raise ProtocolError(f"{self.cluster} has {self.m} rails, got {sq.size} squeezing values")
        if not np.all(np.isfinite(sq)):
            raise ProtocolError("squeezing must be finite")
        return sq

    def column_squeezing(self) -> np.ndarray:
        return np.concatenate([[self.r_high, self.r_high], self.rail_squeezing()])

    def to_json(self) -> dict:
        return {
            "cluster": self.cluster,
            "squeeze": self.rail_squeezing().tolist(),
            "r_high": self.r_high,
            "input_mean": list(self.input_mean),
            "seed": self.seed,
            "vectors": self.vectors,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ProtocolSpec":
        return cls(
            cluster=d["cluster"],
            squeeze=tuple(np.atleast_1d(d.get("squeeze", 1.0)).tolist()),
            r_high=float(d.get("r_high", R_HIGH_DEFAULT)),
            input_mean=tuple(d.get("input_mean", (0.0, 0.0))),
            seed=int(d.get("seed", 0)),
            vectors=d.get("vectors", "recursive"),
        )


def cluster_alpha(spec: ProtocolSpec) -> np.ndarray:
    """Vectors for the cluster: rows are vertices, column ``l`` is fed by squeezer ``l``."""
    g = spec.graph
    if spec.vectors == "paper":
        if spec.cluster.lower() != "diamond":
            raise ProtocolError("stored paper vectors exist only for the diamond cluster")
        return paper_fixture("diamond")[1].alpha
    if spec.vectors != "recursive":
        raise ProtocolError(f"unknown vector strategy {spec.vectors!r}")
    n = g.n
    order = [0, n - 1] + list(range(1, n - 1))
    G = derive_gram(g).G
    alpha = np.zeros((n, n))
    alpha[order] = triangular_factor(G[np.ix_(order, order)])
    return alpha


def _check_alpha(spec, alpha):
    alpha = cluster_alpha(spec) if alpha is None else np.asarray(alpha, dtype=float)
    n = spec.graph.n
    if alpha.shape != (n, n):
        raise ProtocolError(f"{spec.cluster} needs {n}x{n} vectors, got {alpha.shape}")
    return alpha


def prepare(spec: ProtocolSpec, alpha=None) -> GaussianState:
    """Input on mode 0, cluster vertices on modes 1..n, after the input CZ."""
    alpha = _check_alpha(spec, alpha)
    g = spec.graph
    U = assemble_unitary(g, alpha)
    st = coherent(np.concatenate([spec.input_mean, np.zeros(2 * g.n)]))
    for l, r in enumerate(spec.column_squeezing()):
        st = apply(st, squeeze(l + 1, r))
    st = apply_interferometer(st, U, modes=range(1, g.n + 1))
    return apply(st, qnd_cz(0, 1))


def correction_sequence(spec: ProtocolSpec, outcomes: Sequence[float]):
    """Feedforward on the (single remaining) output mode, in application order.

    ``outcomes`` are ``(s_in, s_1, s_rail_1, ..., s_rail_m)``; the rail
    outcomes enter through their mean.
    """
    m = spec.m
    s = np.asarray(outcomes, dtype=float)
    if s.shape != (m + 2,):
        raise ProtocolError(f"{spec.cluster} expects {m + 2} outcomes, got {s.size}")
    return [
        displace(0, -s[2:].mean(), 0.0),
        fourier_inverse(0),
        displace(0, -s[1], 0.0),
        fourier_inverse(0),
        displace(0, -s[0], 0.0),
        fourier_inverse(0),
    ]


def _corrected_mean(spec, v, s):
    st = GaussianState(np.asarray(v, dtype=float), np.eye(2) * VACUUM_VARIANCE)
    for op in correction_sequence(spec, s):
        st = apply(st, op)
    return st.mean


@dataclass(frozen=True)
class HeisenbergOracle:
    """Output quadratures as input quadratures plus cluster nullifiers.

    ``x_out = x_in + sum_a x_weights[a] n_a`` and
    ``p_out = p_in + sum_a p_weights[a] n_a``, where the nullifier
    ``n_a = sum_l coeffs[a, l] e^{-R_l} p0_l`` (``coeffs = (I + Adj^2) alpha``)
    in terms of the vacuum momenta feeding the squeezers.
    """

    x_weights: np.ndarray
    p_weights: np.ndarray
    coeffs: np.ndarray
    R: np.ndarray

    def nullifier_covariance(self) -> np.ndarray:
        """Covariance of the nullifiers in vacuum units."""
        c = self.coeffs * np.exp(-self.R)
        return c @ c.T

    @property
    def excess_x(self) -> float:
        return float(self.x_weights @ self.nullifier_covariance() @ self.x_weights)

    @property
    def excess_p(self) -> float:
        return float(self.p_weights @ self.nullifier_covariance() @ self.p_weights)

    @property
    def uncorrelated_excess_p(self) -> float:
        """``p`` excess counting each nullifier's variance alone (cross terms dropped)."""
        return float(self.p_weights**2 @ np.diag(self.nullifier_covariance()))

    def forms(self) -> np.ndarray:
        """Rows ``x_out``, ``p_out`` over ``(x_in, p_in, x0_1, p0_1, ..., x0_n, p0_n)``."""
        n = len(self.R)
        nl = np.zeros((n, 2 + 2 * n))
        nl[:, 3::2] = self.coeffs * np.exp(-self.R)
        out = np.zeros((2, 2 + 2 * n))
        out[0, 0] = 1.0
        out[1, 1] = 1.0
        out[0] += self.x_weights @ nl
        out[1] += self.p_weights @ nl
        return out


def heisenberg_oracle(spec: ProtocolSpec, alpha=None) -> HeisenbergOracle:
    alpha = _check_alpha(spec, alpha)
    g = spec.graph
    n, m = g.n, spec.m
    xw = np.zeros(n)
    xw[0], xw[n - 1] = 1.0, -1.0
    pw = np.zeros(n)
    pw[1 : n - 1] = -1.0 / m
    A = g.adjacency
    coeffs = (np.eye(n) + A @ A) @ alpha
    return HeisenbergOracle(xw, pw, coeffs, spec.column_squeezing())


def output_operators(spec: ProtocolSpec, alpha=None) -> np.ndarray:
    """Corrected output quadratures by direct propagation with deferred measurement.

    Rows ``x_out``, ``p_out`` over ``(x_in, p_in, x0_1, p0_1, ...)``: the
    initial input and squeezer-vacuum quadratures.
    """
    alpha = _check_alpha(spec, alpha)
    g = spec.graph
    n = g.n
    N = n + 1
    S = np.eye(2 * N)
    for l, r in enumerate(spec.column_squeezing()):
        S = squeeze(l + 1, r).matrix(N) @ S
    U = assemble_unitary(g, alpha)
    T = np.eye(2 * N)
    T[2:, 2:] = interferometer_symplectic(U)
    S = qnd_cz(0, 1).matrix(N) @ T @ S
    out = S[[2 * n, 2 * n + 1]]
    measured = S[[2 * k + 1 for k in range(n)]]
    W = np.column_stack([_corrected_mean(spec, e, np.zeros(spec.m + 2)) for e in np.eye(2)])
    E = np.column_stack(
        [_corrected_mean(spec, np.zeros(2), e) for e in np.eye(spec.m + 2)]
    )
    return W @ out + E @ measured


@dataclass
class TeleportReport:
    spec: ProtocolSpec
    outcomes: np.ndarray
    output_mean: np.ndarray
    conditional_cov: np.ndarray
    output_cov: np.ndarray
    oracle: HeisenbergOracle = field(repr=False)

    @property
    def excess_x(self) -> float:
        return float((self.output_cov[0, 0] - VACUUM_VARIANCE) / VACUUM_VARIANCE)

    @property
    def excess_p(self) -> float:
        return float((self.output_cov[1, 1] - VACUUM_VARIANCE) / VACUUM_VARIANCE)

    @property
    def predicted_x(self) -> float:
        return self.oracle.excess_x

    @property
    def predicted_p(self) -> float:
        return self.oracle.excess_p

    @property
    def uncorrelated_p(self) -> float:
        return self.oracle.uncorrelated_excess_p

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "outcomes": self.outcomes.tolist(),
            "output_mean": self.output_mean.tolist(),
            "conditional_cov": self.conditional_cov.tolist(),
            "output_cov": self.output_cov.tolist(),
            "excess": {"x": self.excess_x, "p": self.excess_p},
            "predicted": {"x": self.predicted_x, "p": self.predicted_p},
            "uncorrelated_nullifier_p": self.uncorrelated_p,
        }


def run_teleport(spec: ProtocolSpec, outcomes="sample", alpha=None, rng=None) -> TeleportReport:
    """Simulate one run of the protocol.

    Args:
        spec: protocol description.
        outcomes: ``"sample"`` to draw outcomes (from ``rng``, else
            ``spec.seed``), or forced values ``(s_in, s_1, s_rail_1, ...)``.
        alpha: optional custom cluster vectors (rows per vertex).
        rng: generator or seed overriding ``spec.seed``.
    """
    alpha = _check_alpha(spec, alpha)
    n = spec.graph.n
    k = spec.m + 2
    forced = None
    if not isinstance(outcomes, str):
        forced = np.asarray(outcomes, dtype=float)
        if forced.shape != (k,):
            raise ProtocolError(f"{spec.cluster} expects {k} outcomes, got {forced.size}")
    elif outcomes != "sample":
        raise ValueError(f"outcomes must be 'sample' or a sequence, got {outcomes!r}")
    gen = _rng(spec.seed if rng is None else rng)

    st = prepare(spec, alpha)
    # outcome factor: the measured momenta before any measurement
    s_factor = st.factor[[2 * j + 1 for j in range(n)]]

    # d(conditional mean)/d(outcomes); the gains do not depend on the outcomes
    J = np.zeros((st.mean.size, k))
    s = np.zeros(k)
    for j in range(k):
        meas = condition_p(st, 0)
        if forced is None:
            s[j] = meas.prior_mean + np.sqrt(meas.variance) * gen.standard_normal()
        else:
            s[j] = forced[j]
        keep = np.arange(2, st.mean.size)
        gain = meas.gain
        J = J[keep] - np.outer(gain, J[1])
        J[:, j] += gain
        mean = meas.state.mean + gain * (s[j] - meas.prior_mean)
        st = GaussianState(mean, meas.state.cov, meas.state.factor)

    out = st
    for op in correction_sequence(spec, s):
        out = apply(out, op)

    W = np.column_stack([_corrected_mean(spec, e, np.zeros(k)) for e in np.eye(2)])
    E = np.column_stack([_corrected_mean(spec, np.zeros(2), e) for e in np.eye(k)])
    spread = (W @ J + E) @ s_factor
    output_cov = out.cov + spread @ spread.T
    return TeleportReport(spec, s, out.mean, out.cov, output_cov, heisenberg_oracle(spec, alpha))


@dataclass(frozen=True)
class MeanTransfer:
    mean: np.ndarray
    stderr: np.ndarray
    shots: int

    def within(self, target, n_sigma: float = 5.0) -> bool:
        return bool(np.all(np.abs(self.mean - np.asarray(target)) <= n_sigma * self.stderr))


def sample_corrected_means(spec: ProtocolSpec, shots: int, alpha=None, rng=None) -> np.ndarray:
    """Corrected output means of ``shots`` independent runs, shape ``(shots, 2)``.

    Conditioning gains do not depend on outcomes, so they are computed once
    and every shot only replays the sequential mean updates.
    """
    alpha = _check_alpha(spec, alpha)
    gen = _rng(spec.seed if rng is None else rng)
    k = spec.m + 2
    st = prepare(spec, alpha)
    means = np.tile(st.mean, (shots, 1))
    outcomes = np.empty((shots, k))
    for j in range(k):
        meas = condition_p(st, 0)
        prior = means[:, 1]
        y = prior + np.sqrt(meas.variance) * gen.standard_normal(shots)
        outcomes[:, j] = y
        means = means[:, 2:] + np.outer(y - prior, meas.gain)
        st = meas.state
    W = np.column_stack([_corrected_mean(spec, e, np.zeros(k)) for e in np.eye(2)])
    E = np.column_stack([_corrected_mean(spec, np.zeros(2), e) for e in np.eye(k)])
    return means @ W.T + outcomes @ E.T


def monte_carlo_mean(spec: ProtocolSpec, shots: int = 10_000, alpha=None, rng=None) -> MeanTransfer:
    c = sample_corrected_means(spec, shots, alpha, rng)
    return MeanTransfer(c.mean(axis=0), c.std(axis=0, ddof=1) / np.sqrt(shots), shots)
