"""Phase-space simulation of Gaussian states.

Conventions: ``a = x + i p`` with ``[x, p] = i/2``, so the vacuum has
quadrature variance 1/4. Vectors are ordered ``(x1, p1, x2, p2, ...)``.

States built from the vacuum by symplectic maps also carry a square-root
factor ``K`` with ``cov = K K^T``. Strongly squeezed states have
covariance entries of order ``e^{2R}``, and quantities like nullifier
variances cancel them down to order ``e^{-2R}``. Computing those from
``K`` keeps the cancellation at order ``e^{R}`` instead, which is what
makes ``R ~ 12`` usable in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateMeasurementError, ModeIndexError, NonUnitaryError

VACUUM_VARIANCE = 0.25
DB_PER_NEPER = 20.0 / np.log(10.0)

UNITARY_TOL = 1e-9
DEGENERATE_VARIANCE = 1e-15


def squeezing_to_db(r):
    """Squeezing parameter (nats) to decibels: variance factor ``e^{-2r}``."""
    return np.asarray(r, dtype=float) * DB_PER_NEPER


def db_to_squeezing(db):
    return np.asarray(db, dtype=float) / DB_PER_NEPER


def symplectic_form(n: int) -> np.ndarray:
    """Block-diagonal ``Omega`` with blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def interferometer_symplectic(U) -> np.ndarray:
    """Real xpxp symplectic matrix of the passive map ``a -> U a``."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    S = np.empty((2 * n, 2 * n))
    S[0::2, 0::2] = U.real
    S[0::2, 1::2] = -U.imag
    S[1::2, 0::2] = U.imag
    S[1::2, 1::2] = U.real
    return S


def unitarity_residual(U) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())


def check_unitary(U, tol=UNITARY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    res = unitarity_residual(U)
    if res > tol:
        raise NonUnitaryError(res, tol)
    return U


def _quads(modes: Sequence[int]) -> np.ndarray:
    return np.array([q for m in modes for q in (2 * m, 2 * m + 1)], dtype=int)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix over ``n_modes`` modes (xpxp order).

    ``factor``, when present, satisfies ``cov == factor @ factor.T`` and is
    used in preference to ``cov`` for quadratic forms.
    """

    mean: np.ndarray
    cov: np.ndarray
    factor: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise ValueError(
                f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def from_factor(cls, mean, factor) -> "GaussianState":
        factor = np.asarray(factor, dtype=float)
        return cls(mean, factor @ factor.T, factor)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def quadratic_form(self, coeffs) -> float:
        """``c^T cov c`` in absolute units."""
        c = np.asarray(coeffs, dtype=float)
        if c.shape != self.mean.shape:
            raise ValueError(f"coefficient vector must have length {self.mean.size}")
        if self.factor is not None:
            w = self.factor.T @ c
            return float(w @ w)
        return float(c @ self.cov @ c)

    def covariance_of(self, forms) -> np.ndarray:
        """Covariance matrix of several linear forms (rows of ``forms``)."""
        L = np.atleast_2d(np.asarray(forms, dtype=float))
        if self.factor is not None:
            W = L @ self.factor
            return W @ W.T
        return L @ self.cov @ L.T

    def reduced(self, modes: Sequence[int]) -> "GaussianState":
        """Marginal state on ``modes`` (in the given order)."""
        _check_modes(self, modes)
        idx = _quads(modes)
        factor = None if self.factor is None else self.factor[idx]
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)], factor)

    def is_physical(self, tol=1e-9) -> bool:
        """Uncertainty relation ``cov + (i/4) Omega >= 0``."""
        H = self.cov + 0.25j * symplectic_form(self.n_modes)
        return bool(np.linalg.eigvalsh(H).min() >= -tol)

    def purity_determinant(self) -> float:
        """``det(4 cov)``; equals 1 for pure states."""
        return float(np.linalg.det(4.0 * self.cov))

    def to_json(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "ordering": "xpxp",
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GaussianState":
        if data.get("ordering", "xpxp") != "xpxp":
            raise ValueError(f"unsupported ordering {data['ordering']!r}")
        state = cls(data["mean"], data["cov"])
        if state.n_modes != int(data["n_modes"]):
            raise ValueError("n_modes does not match array sizes")
        return state


def vacuum(n: int) -> GaussianState:
    if n < 1:
        raise ValueError("need at least one mode")
    return GaussianState.from_factor(np.zeros(2 * n), 0.5 * np.eye(2 * n))


def coherent(means) -> GaussianState:
    """Product of coherent states with the given ``(x, p)`` means per mode."""
    mean = np.asarray(means, dtype=float).ravel()
    st = vacuum(mean.size // 2)
    return GaussianState.from_factor(mean, st.factor)


def _check_modes(state: GaussianState, modes):
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise ModeIndexError(f"mode {m} out of range for {state.n_modes}-mode state")


# --- symplectic operations -------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """An affine symplectic map acting on a few modes.

    ``local`` is the ``2k x 2k`` xpxp matrix on ``modes`` and ``shift`` the
    displacement applied after it.
    """

    kind: str
    modes: tuple
    params: tuple
    local: np.ndarray
    shift: np.ndarray
    inverted: bool = False

    def matrix(self, n: int) -> np.ndarray:
        S = np.eye(2 * n)
        idx = _quads(self.modes)
        S[np.ix_(idx, idx)] = self.local
        return S

    def displacement(self, n: int) -> np.ndarray:
        d = np.zeros(2 * n)
        d[_quads(self.modes)] = self.shift
        return d

    def inverse(self) -> "SymplecticOp":
        k = len(self.modes)
        omega = symplectic_form(k)
        inv = -omega @ self.local.T @ omega
        return SymplecticOp(
            self.kind, self.modes, self.params, inv, -inv @ self.shift, not self.inverted
        )


def _op(kind, modes, params, local, shift=None):
    local = np.asarray(local, dtype=float)
    if shift is None:
        shift = np.zeros(local.shape[0])
    return SymplecticOp(kind, tuple(int(m) for m in modes), tuple(params), local, np.asarray(shift, float))


def squeeze(mode: int, r: float) -> SymplecticOp:
    """``x -> e^{r} x``, ``p -> e^{-r} p``; ``r > 0`` squeezes momentum."""
    return _op("Squeeze", (mode,), (r,), np.diag([np.exp(r), np.exp(-r)]))


def beam_splitter(mode_a: int, mode_b: int, t: float, sign: int = +1) -> SymplecticOp:
    """Real beam splitter with mode matrix ``[[t, s], [+-s, -+t]]``, ``s = sqrt(1-t^2)``."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if abs(t) > 1:
        raise ValueError("transmissivity amplitude must lie in [-1, 1]")
    s = np.sqrt(1.0 - t * t)
    u = np.array([[t, s], [sign * s, -sign * t]])
    return _op("BeamSplitter", (mode_a, mode_b), (t, sign), interferometer_symplectic(u))


def fourier(mode: int) -> SymplecticOp:
    """``a -> i a``: ``x -> -p``, ``p -> x``."""
    return _op("Fourier", (mode,), (), [[0.0, -1.0], [1.0, 0.0]])


def fourier_inverse(mode: int) -> SymplecticOp:
    """``a -> -i a``: ``x -> p``, ``p -> -x``."""
    return _op("FourierInverse", (mode,), (), [[0.0, 1.0], [-1.0, 0.0]])


def phase(mode: int, phi: float) -> SymplecticOp:
    return _op("Phase", (mode,), (phi,), interferometer_symplectic([[np.exp(1j * phi)]]))


def qnd_cz(mode_a: int, mode_b: int, g: float = 1.0) -> SymplecticOp:
    """``exp(2 i g x_a x_b)``: ``p_a -> p_a + g x_b``, ``p_b -> p_b + g x_a``."""
    local = np.eye(4)
    local[1, 2] = g
    local[3, 0] = g
    return _op("QndCz", (mode_a, mode_b), (g,), local)


def displace(mode: int, dx: float = 0.0, dp: float = 0.0) -> SymplecticOp:
    return _op("Displace", (mode,), (dx, dp), np.eye(2), [dx, dp])


def swap(mode_a: int, mode_b: int) -> SymplecticOp:
    local = np.zeros((4, 4))
    local[0, 2] = local[1, 3] = local[2, 0] = local[3, 1] = 1.0
    return _op("Swap", (mode_a, mode_b), (), local)


def apply(state: GaussianState, op: SymplecticOp) -> GaussianState:
    """Gaussian update ``mean -> S mean + d``, ``cov -> S cov S^T`` on ``op.modes``."""
    _check_modes(state, op.modes)
    if len(set(op.modes)) != len(op.modes):
        raise ModeIndexError(f"repeated mode in {op.modes}")
    idx = _quads(op.modes)
    L = op.local
    mean = state.mean.copy()
    mean[idx] = L @ mean[idx] + op.shift
    if state.factor is not None:
        factor = state.factor.copy()
        factor[idx] = L @ factor[idx]
        return GaussianState.from_factor(mean, factor)
    cov = state.cov.copy()
    cov[idx, :] = L @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ L.T
    return GaussianState(mean, cov)


def apply_all(state: GaussianState, ops) -> GaussianState:
    for op in ops:
        state = apply(state, op)
    return state


def apply_interferometer(
    state: GaussianState, U, modes: Optional[Sequence[int]] = None, tol=UNITARY_TOL
) -> GaussianState:
    """Apply ``a_k -> sum_l U_kl a_l`` on ``modes`` (all modes by default)."""
    U = check_unitary(U, tol)
    if modes is None:
        modes = range(state.n_modes)
    modes = list(modes)
    if U.shape[0] != len(modes):
        raise ValueError(f"{U.shape[0]}x{U.shape[0]} interferometer on {len(modes)} modes")
    op = _op("Interferometer", modes, (), interferometer_symplectic(U))
    return apply(state, op)


# --- homodyne measurement ---------------------------------------------------


class PMeasurement(NamedTuple):
    """Result of conditioning on ``p`` of one mode, before fixing the outcome.

    The conditional state for outcome ``y`` has mean
    ``state.mean + gain * (y - prior_mean)`` and covariance ``state.cov``.
    """

    state: GaussianState
    prior_mean: float
    variance: float
    gain: np.ndarray


def condition_p(state: GaussianState, mode: int) -> PMeasurement:
    """Schur-complement update for a p-homodyne on ``mode``; the mode is removed."""
    _check_modes(state, [mode])
    j = 2 * mode + 1
    keep = np.array([i for i in range(state.mean.size) if i // 2 != mode], dtype=int)
    if state.factor is not None:
        K = state.factor
        w = K[j]
        var = float(w @ w)
        if var < DEGENERATE_VARIANCE:
            raise DegenerateMeasurementError(f"p{mode} has marginal variance {var:.3e}")
        cross = K[keep] @ w
        factor = K[keep] - np.outer(cross / var, w)
        reduced = GaussianState.from_factor(state.mean[keep], factor)
    else:
        var = float(state.cov[j, j])
        if var < DEGENERATE_VARIANCE:
            raise DegenerateMeasurementError(f"p{mode} has marginal variance {var:.3e}")
        cross = state.cov[keep, j]
        cov = state.cov[np.ix_(keep, keep)] - np.outer(cross, cross) / var
        reduced = GaussianState(state.mean[keep], cov)
    return PMeasurement(reduced, float(state.mean[j]), var, cross / var)


def _rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def homodyne_p(
    state: GaussianState,
    mode: int,
    outcome: Union[float, str] = "sample",
    rng=None,
):
    """Measure ``p`` of ``mode``.

    Args:
        state: state to measure.
        mode: 0-based mode index.
        outcome: a forced outcome, or ``"sample"`` to draw it from the
            marginal distribution of ``p_mode``.
        rng: ``numpy.random.Generator`` or integer seed used when sampling.

    Returns:
        ``(conditional state on the remaining modes, outcome)``. The
        conditional covariance does not depend on the outcome.
    """
    meas = condition_p(state, mode)
    if isinstance(outcome, str):
        if outcome != "sample":
            raise ValueError(f"outcome must be a number or 'sample', got {outcome!r}")
        y = meas.prior_mean + np.sqrt(meas.variance) * _rng(rng).standard_normal()
    else:
        y = float(outcome)
    st = meas.state
    mean = st.mean + meas.gain * (y - meas.prior_mean)
    return GaussianState(mean, st.cov, st.factor), float(y)


def nullifier_variance(state: GaussianState, coeffs) -> float:
    """Variance of ``coeffs . (x1, p1, ...)`` in vacuum units (vacuum x = 1)."""
    return state.quadratic_form(coeffs) / VACUUM_VARIANCE
