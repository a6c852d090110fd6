"""Pauli-transfer-matrix form of the resistance-qubit channels.

A single-qubit state ``rho = (I + x X + y Y + z Z) / 2`` is carried as its
Bloch vector ``v = (x, y, z)``.  A trace-preserving channel then acts affinely,
``v -> E v + k``; the 4x4 transfer matrix is ``[[1, 0], [k, E]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .sim import PAULI, QuantumState

_PAULIS = [PAULI[p] for p in "IXYZ"]


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.x**2 + self.y**2 + self.z**2 > 1 + 1e-9:
            raise ValueError(f"Bloch vector {self.as_array()} lies outside the unit ball")

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        x, y, z = np.asarray(v, dtype=float)
        return cls(x, y, z)

    @classmethod
    def from_state(cls, state: QuantumState) -> "BlochVector":
        return cls.from_array(state.bloch())

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def to_state(self) -> QuantumState:
        return QuantumState.from_bloch(self.as_array())

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


BlochLike = Union[BlochVector, QuantumState, np.ndarray, tuple, list]


def as_bloch(value: BlochLike) -> np.ndarray:
    """Coerce a Bloch vector, one-qubit state or 3-sequence to an array."""
    if isinstance(value, BlochVector):
        return value.as_array()
    if isinstance(value, QuantumState):
        return value.bloch()
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-component Bloch vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class PauliTransferMap:
    """Affine Bloch-vector map ``v -> E @ v + k``."""

    E: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        e = np.array(self.E, dtype=float)
        k = np.array(self.k, dtype=float)
        if e.shape != (3, 3) or k.shape != (3,):
            raise ValueError("PauliTransferMap needs a 3x3 E and a 3-vector k")
        e.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "E", e)
        object.__setattr__(self, "k", k)

    def __call__(self, v: BlochLike) -> np.ndarray:
        return self.E @ as_bloch(v) + self.k

    def as_matrix(self) -> np.ndarray:
        r = np.zeros((4, 4))
        r[0, 0] = 1.0
        r[1:, 0] = self.k
        r[1:, 1:] = self.E
        return r

    def apply_to_operator(self, a: np.ndarray) -> np.ndarray:
        """Act on an arbitrary 2x2 operator through the transfer matrix."""
        r = self.as_matrix()
        coeffs = np.array([np.trace(p @ a) for p in _PAULIS])
        out_coeffs = r @ coeffs
        return 0.5 * sum(c * p for c, p in zip(out_coeffs, _PAULIS))

    def choi(self) -> np.ndarray:
        """Choi matrix ``sum_ij |i><j| (x) Lambda(|i><j|)``."""
        j = np.zeros((4, 4), dtype=complex)
        for a in range(2):
            for b in range(2):
                unit = np.zeros((2, 2), dtype=complex)
                unit[a, b] = 1
                j += np.kron(unit, self.apply_to_operator(unit))
        return j

    def is_cptp(self, tol: float = 1e-9) -> bool:
        # trace preservation is structural (first row of the PTM is (1,0,0,0))
        choi = self.choi()
        choi = 0.5 * (choi + choi.conj().T)
        return bool(np.linalg.eigvalsh(choi).min() >= -tol)

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.E))))


def ptm_plasticity(theta: float, rho_c: BlochLike) -> PauliTransferMap:
    """Transfer matrix of ``rho_R -> Tr_C(M (rho_C (x) rho_R) M^dagger)``."""
    cx, cy, cz = as_bloch(rho_c)
    c, s = np.cos(theta), np.sin(theta)
    e = np.array(
        [
            [cx * c - cy * s**3, -cx * c**2 * s, -c * s**2],
            [cy * c**3, cx * c * s**2 - cy * s, -(c**2) * s],
            [-cy * c * s, cx * c * s, s**2],
        ]
    )
    k = cz * np.array([c * s**2, c**2 * s, c**2])
    return PauliTransferMap(e, k)


def ptm_encoding(theta: float, rho_c: BlochLike) -> PauliTransferMap:
    """Transfer matrix of the measure-and-correct encoding map on the resistance qubit."""
    cx, cy, cz = as_bloch(rho_c)
    c, s = np.cos(theta), np.sin(theta)
    cs = c * s
    e = np.array(
        [
            [s**2, -cz * cs, cy * cs],
            [cz * cs, s**2, -cx * cs],
            [-cy * cs, cx * cs, s**2],
        ]
    )
    k = c**2 * np.array([cx, cy, cz])
    return PauliTransferMap(e, k)


@dataclass(frozen=True, eq=False)
class FixedPointFamily:
    """Affine family ``particular + span(null_space)`` of fixed points.

    Returned instead of a single state when ``I - E`` is singular, e.g. for
    the identity channel.
    """

    particular: np.ndarray
    null_space: np.ndarray  # shape (3, d), orthonormal columns
    residual: float


def steady_state(
    ptm: PauliTransferMap, cond_limit: float = 1e12
) -> BlochVector | FixedPointFamily:
    """Solve ``(I - E) v = k`` for the fixed point of the affine map."""
    a = np.eye(3) - ptm.E
    if np.linalg.cond(a) < cond_limit:
        v = np.linalg.solve(a, ptm.k)
        return BlochVector.from_array(v)
    u, sv, vh = np.linalg.svd(a)
    scale = max(sv[0], 1.0)
    null = vh[sv <= scale / cond_limit].T
    particular, *_ = np.linalg.lstsq(a, ptm.k, rcond=1 / cond_limit)
    residual = float(np.linalg.norm(a @ particular - ptm.k))
    return FixedPointFamily(particular, null, residual)


def iterate(ptm: PauliTransferMap, initial: BlochLike, steps: int) -> np.ndarray:
    """Trajectory ``v_0 .. v_steps`` with ``v_{t+1} = E v_t + k``; shape ``(steps+1, 3)``."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    out = np.empty((steps + 1, 3))
    out[0] = as_bloch(initial)
    for t in range(steps):
        out[t + 1] = ptm.E @ out[t] + ptm.k
    return out
