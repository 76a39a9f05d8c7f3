"""Off-line squeezers followed by one interferometer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussian import (
    GaussianState,
    apply_all,
    apply_interferometer,
    check_unitary,
    squeeze,
    squeezing_to_db,
    vacuum,
)
from .graph import Graph


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    """Circuit that momentum-squeezes vacuum mode ``l`` by ``R[l]`` and then applies ``U``.

    ``V`` is the (state-irrelevant) input interferometer of the full
    Bogoliubov decomposition, ``lambdaA``/``lambdaB`` the squared singular
    values with ``e^{+-R} = sqrt(lambdaA) +- sqrt(lambdaB)``.
    """

    U: np.ndarray
    R: np.ndarray
    lambdaA: np.ndarray
    lambdaB: np.ndarray
    provenance: dict = field(default_factory=dict)
    V: np.ndarray = None

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float))
        object.__setattr__(self, "lambdaA", np.asarray(self.lambdaA, dtype=float))
        object.__setattr__(self, "lambdaB", np.asarray(self.lambdaB, dtype=float))
        if self.V is None:
            object.__setattr__(self, "V", np.eye(U.shape[0], dtype=complex))

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def R_db(self) -> np.ndarray:
        return squeezing_to_db(self.R)

    @property
    def graph(self):
        g = self.provenance.get("graph")
        return None if g is None else Graph.from_json(g)

    def prepare_state(self) -> GaussianState:
        st = apply_all(vacuum(self.n), [squeeze(l, r) for l, r in enumerate(self.R)])
        return apply_interferometer(st, self.U)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "U": [[[z.real, z.imag] for z in row] for row in self.U],
            "R": self.R.tolist(),
            "lambdaA": self.lambdaA.tolist(),
            "lambdaB": self.lambdaB.tolist(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SynthesisResult":
        U = np.array([[complex(re, im) for re, im in row] for row in data["U"]])
        if U.shape != (data["n"], data["n"]):
            raise ValueError("U shape does not match n")
        n = U.shape[0]
        R = np.asarray(data["R"], dtype=float)
        lamA = data.get("lambdaA")
        lamB = data.get("lambdaB")
        if lamA is None or lamB is None:
            lamA, lamB = np.cosh(R) ** 2, np.sinh(R) ** 2
        if R.shape != (n,):
            raise ValueError("R must have one entry per mode")
        return cls(U, R, lamA, lamB, dict(data.get("provenance", {})))


def offline_circuit(U, R, provenance=None) -> SynthesisResult:
    """Wrap an interferometer fed by squeezers ``R`` (no on-line squeezing)."""
    U = check_unitary(U)
    R = np.broadcast_to(np.asarray(R, dtype=float), (U.shape[0],)).copy()
    return SynthesisResult(U, R, np.cosh(R) ** 2, np.sinh(R) ** 2, provenance or {})
