"""Dense linear-algebra helpers: Takagi factorization and Haar sampling."""

from __future__ import annotations

import numpy as np
from scipy.linalg import null_space
from scipy.stats import unitary_group

ZERO_TOL = 1e-10
DEGENERACY_TOL = 1e-8
PIVOT_TOL = 1e-9


def haar_unitary(n: int, rng=None) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(
        2j * np.pi * np.random.default_rng(rng).random((1, 1))
    )


def _interleave(U: np.ndarray) -> np.ndarray:
    Z = np.empty((2 * U.shape[0], U.shape[1]))
    Z[0::2] = U.real
    Z[1::2] = U.imag
    return Z


def canonical_rotation(U: np.ndarray, tol: float = PIVOT_TOL) -> np.ndarray:
    """Real orthogonal ``Q`` putting the columns of ``U`` in echelon form.

    Rows are scanned in the order Re U_1, Im U_1, Re U_2, ... ; each new
    column of ``U @ Q`` starts at the first row with a component (above
    ``tol``) outside the span already used, and that component is positive.
    """
    Z = _interleave(U)
    k = U.shape[1]
    basis = np.eye(k)
    cols = []
    for row in Z:
        if basis.shape[1] == 0:
            break
        r = row @ basis
        nr = np.linalg.norm(r)
        if nr <= tol:
            continue
        cols.append(basis @ (r / nr))
        comp = null_space((r / nr)[None, :])
        basis = basis @ comp
    if basis.shape[1]:
        cols.extend(basis.T)
    return np.column_stack(cols)


def _group(values: np.ndarray, tol: float):
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or abs(values[i] - values[i - 1]) > tol * max(1.0, abs(values[i - 1])):
            groups.append(slice(start, i))
            start = i
    return groups


def takagi(M, zero_tol: float = ZERO_TOL, degeneracy_tol: float = DEGENERACY_TOL):
    """Takagi (Autonne) factorization ``M = U diag(d) U^T`` of a complex symmetric matrix.

    ``d`` is returned in descending order. Within a block of equal values
    the columns of ``U`` are only defined up to a real orthogonal rotation
    (any unitary one for ``d = 0``); that freedom is fixed with
    :func:`canonical_rotation` so the result is deterministic.

    The factor comes from the real symmetric embedding
    ``[[Re M, Im M], [Im M, -Re M]]``, whose eigenvector ``(x, y)`` for
    eigenvalue ``s > 0`` gives the column ``x + i y`` with ``M u* = s u``.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.T).max() > 1e-9 * scale:
        raise ValueError("takagi() needs a symmetric matrix")
    H = np.block([[M.real, M.imag], [M.imag, -M.real]])
    w, V = np.linalg.eigh(H)
    order = np.argsort(-w)[:n]
    w, V = w[order], V[:, order]
    pos = w > zero_tol * scale
    d = np.where(pos, w, 0.0)
    U = V[:n] + 1j * V[n:]
    k = int(pos.sum())
    if k < n:
        comp = null_space(U[:, :k].conj().T) if k else np.eye(n, dtype=complex)
        U = np.column_stack([U[:, :k], comp])
    for sl in _group(d, degeneracy_tol):
        U[:, sl] = U[:, sl] @ canonical_rotation(U[:, sl])
    return U, d
