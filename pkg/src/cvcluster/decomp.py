"""Interferometers as products of beam splitters, Fourier gates, phases and swaps.

A network is an ordered product ``E_1 E_2 ... E_m``: the rightmost element
acts first, so an operator product can be transcribed left to right.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DecompositionError
from .gaussian import check_unitary

ROUNDTRIP_TOL = 1e-9
_SKIP = 1e-15


@dataclass(frozen=True)
class Element:
    """One elementary gate on 0-based ``modes``.

    kinds:
        ``"F"``    identity except ``i`` (``-i`` if ``dagger``) at ``(k, k)``
        ``"BS"``   identity except ``[[t, s], [sign s, -sign t]]`` on ``(k, l)``, ``s = sqrt(1-t^2)``
        ``"P"``    identity except ``exp(i phi)`` at ``(k, k)``
        ``"SWAP"`` exchanges modes ``k`` and ``l``
    """

    kind: str
    modes: tuple
    t: float = 1.0
    sign: int = 1
    dagger: bool = False
    phi: float = 0.0

    def matrix(self, n: int) -> np.ndarray:
        M = np.eye(n, dtype=complex)
        if max(self.modes) >= n:
            raise ValueError(f"{self} does not fit in {n} modes")
        k = self.modes[0]
        if self.kind == "F":
            M[k, k] = -1j if self.dagger else 1j
        elif self.kind == "P":
            M[k, k] = np.exp(1j * self.phi)
        elif self.kind == "BS":
            l = self.modes[1]
            s = np.sqrt(max(0.0, 1.0 - self.t * self.t))
            M[k, k] = self.t
            M[k, l] = s
            M[l, k] = self.sign * s
            M[l, l] = -self.sign * self.t
        elif self.kind == "SWAP":
            l = self.modes[1]
            M[[k, l]] = M[[l, k]]
        else:
            raise ValueError(f"unknown element kind {self.kind!r}")
        return M

    def to_json(self) -> dict:
        one = [m + 1 for m in self.modes]
        if self.kind == "BS":
            return {"type": "BS", "modes": one, "t": self.t, "sign": "+" if self.sign > 0 else "-"}
        if self.kind == "F":
            return {"type": "F", "mode": one[0], "dagger": self.dagger}
        if self.kind == "P":
            return {"type": "P", "mode": one[0], "phi": self.phi}
        return {"type": "SWAP", "modes": one}

    @classmethod
    def from_json(cls, d: dict) -> "Element":
        kind = d["type"]
        if kind == "BS":
            k, l = (int(m) - 1 for m in d["modes"])
            return beam_splitter(k, l, float(d["t"]), d.get("sign", "+"))
        if kind == "F":
            return fourier(int(d["mode"]) - 1, bool(d.get("dagger", False)))
        if kind == "P":
            return phase(int(d["mode"]) - 1, float(d["phi"]))
        if kind == "SWAP":
            k, l = (int(m) - 1 for m in d["modes"])
            return swap(k, l)
        raise ValueError(f"unknown element type {kind!r}")


def fourier(k: int, dagger: bool = False) -> Element:
    return Element("F", (k,), dagger=dagger)


def beam_splitter(k: int, l: int, t: float, sign=+1) -> Element:
    if sign in ("+", "-"):
        sign = 1 if sign == "+" else -1
    if k == l or abs(t) > 1:
        raise ValueError(f"bad beam splitter on ({k}, {l}) with t={t}")
    return Element("BS", (k, l), t=float(t), sign=int(sign))


def phase(k: int, phi: float) -> Element:
    return Element("P", (k,), phi=float(phi))


def swap(k: int, l: int) -> Element:
    return Element("SWAP", (k, l))


@dataclass
class ElementaryNetwork:
    n: int
    elements: List[Element] = field(default_factory=list)
    target: Optional[np.ndarray] = None

    def matrix(self) -> np.ndarray:
        return evaluate_network(self)

    @property
    def n_beam_splitters(self) -> int:
        return sum(e.kind == "BS" for e in self.elements)

    def residual(self) -> float:
        if self.target is None:
            raise ValueError("network has no target matrix")
        return float(np.abs(self.matrix() - self.target).max())

    def to_json(self) -> dict:
        return {"n": self.n, "elements": [e.to_json() for e in self.elements]}

    @classmethod
    def from_json(cls, data: dict) -> "ElementaryNetwork":
        return cls(int(data["n"]), [Element.from_json(e) for e in data["elements"]])


def evaluate_network(net: ElementaryNetwork) -> np.ndarray:
    M = np.eye(net.n, dtype=complex)
    for e in net.elements:
        M = M @ e.matrix(net.n)
    return M


def reck_decompose(U, tol: float = ROUNDTRIP_TOL) -> ElementaryNetwork:
    """Triangular (Reck-style) decomposition of a unitary.

    Sub-diagonal entries are nulled column by column, bottom to top, each
    by a phase on the lower mode followed by a real rotation of two
    neighbouring modes. The leftover diagonal becomes phase elements. At
    most ``n(n-1)/2`` beam splitters are used.

    Raises:
        NonUnitaryError: for non-unitary input.
        DecompositionError: if the product misses ``U`` by more than ``tol``.
    """
    U = check_unitary(U, tol)
    n = U.shape[0]
    W = U.copy()
    steps = []
    for j in range(n - 1):
        for i in range(n - 1, j, -1):
            a, b = W[i - 1, j], W[i, j]
            if abs(b) < _SKIP:
                continue
            phi = float(np.angle(a) - np.angle(b)) if abs(a) >= _SKIP else -float(np.angle(b))
            W[i] *= np.exp(1j * phi)
            rho = np.hypot(abs(a), abs(b))
            t, s = abs(a) / rho, abs(b) / rho
            upper, lower = W[i - 1].copy(), W[i].copy()
            W[i - 1] = t * upper + s * lower
            W[i] = -s * upper + t * lower
            steps.append((i, phi, t))

    # U = prod_k (P_i(phi_k)^dag T_k^dag) D, and T^dag is the '-' splitter with its modes swapped
    elements = []
    for i, phi, t in steps:
        if abs(np.angle(np.exp(-1j * phi))) > _SKIP:
            elements.append(phase(i, -phi))
        elements.append(beam_splitter(i, i - 1, t, -1))
    for k in range(n):
        ang = float(np.angle(W[k, k]))
        if abs(ang) > _SKIP:
            elements.append(phase(k, ang))

    net = ElementaryNetwork(n, elements, U)
    res = net.residual()
    if res > tol:
        raise DecompositionError(f"decomposition residual {res:.3e} exceeds {tol:.1e}", res)
    return net


def paper_minimal_chain4() -> ElementaryNetwork:
    """Three-beam-splitter circuit for the linear 4-mode cluster:
    ``F4 S12 F1^dag B34+(1/sqrt2) B12+(-1/sqrt2) B23-(1/sqrt5) F3^dag F4^dag``."""
    r2, r5 = 1 / np.sqrt(2), 1 / np.sqrt(5)
    elements = [
        fourier(3),
        swap(0, 1),
        fourier(0, dagger=True),
        beam_splitter(2, 3, r2, +1),
        beam_splitter(0, 1, -r2, +1),
        beam_splitter(1, 2, r5, -1),
        fourier(2, dagger=True),
        fourier(3, dagger=True),
    ]
    net = ElementaryNetwork(4, elements)
    net.target = net.matrix()
    return net
