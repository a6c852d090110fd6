"""Memristive two- and three-qubit gates and their circuit forms.

The two-qubit gate acts on ``|c>|r>`` where ``c`` is the current qubit and
``r`` the resistance qubit.  A current ``|0>`` (flowing A to B) followed by
reflection flips ``|0>_R`` towards ``|1>_R`` by an angle ``pi - 2*theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .sim import (
    CNOT,
    I2,
    S,
    QuantumState,
    SimulationError,
    apply_gate,
    apply_kraus,
    controlled,
    exp_pauli,
)

TWO_PI = 2 * np.pi

_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

# CNOT with the resistance qubit (second factor) as control
CNOT_R_TO_C = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


def build_m_theta(theta: float) -> np.ndarray:
    """The memristive gate in the basis ``|0_C 0_R>, |0_C 1_R>, |1_C 0_R>, |1_C 1_R>``."""
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * theta)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 0, e],
            [0, c, 1j * s, 0],
            [0, 1j * np.conj(e) * s, np.conj(e) * c, 0],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class ElementaryGate:
    """One gate of a circuit on the (current=0, resistance=1) pair."""

    name: str
    matrix: np.ndarray = field(repr=False)
    targets: tuple[int, ...]


def build_m_theta_decomposed(theta: float) -> list[ElementaryGate]:
    """Elementary-gate circuit for :func:`build_m_theta`, in time order.

    Uses ``R_z = exp(-i theta/2 Z)`` and ``R_x = exp(-i (pi/2 - theta) X)``:
    a CNOT controlled by the resistance qubit, ``R_x`` on the resistance
    qubit controlled by the current qubit, ``exp(-i theta/2 Z(x)Z)`` as
    CNOT-``R_z``-CNOT, then ``S R_z^dagger`` on the current qubit.  The
    product equals the gate up to a global phase.
    """
    r_z = exp_pauli("Z", theta / 2)
    r_x = exp_pauli("X", np.pi / 2 - theta)
    return [
        ElementaryGate("CNOT", CNOT, (1, 0)),
        ElementaryGate("C-Rx", controlled(r_x), (0, 1)),
        ElementaryGate("CNOT", CNOT, (0, 1)),
        ElementaryGate("Rz", r_z, (1,)),
        ElementaryGate("CNOT", CNOT, (0, 1)),
        ElementaryGate("Rz^dag", r_z.conj().T, (0,)),
        ElementaryGate("S", S, (0,)),
    ]


def circuit_unitary(gates: Sequence[ElementaryGate], n_qubits: int = 2) -> np.ndarray:
    """Multiply out a time-ordered gate list into one matrix."""
    dim = 2**n_qubits
    cols = []
    for j in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[j] = 1
        state = QuantumState(basis)
        for g in gates:
            state = apply_gate(state, g.matrix, g.targets)
        cols.append(state.data)
    return np.array(cols).T


def _m_tilde_index(c: int, r: int) -> int:
    # |0>_C = |1>_A|0>_B, |1>_C = |0>_A|1>_B ; basis index = 4A + 2B + R
    a, b = (1, 0) if c == 0 else (0, 1)
    return 4 * a + 2 * b + r


def build_m_tilde(theta: float) -> np.ndarray:
    """Three-qubit gate on ``|A B R>``: M_theta on ``{|10>, |01>}_AB``, identity elsewhere."""
    m = build_m_theta(theta)
    out = np.eye(8, dtype=complex)
    idx = [_m_tilde_index(c, r) for c in (0, 1) for r in (0, 1)]
    for i, ii in enumerate(idx):
        for j, jj in enumerate(idx):
            out[ii, jj] = m[i, j]
    return out


@dataclass(frozen=True)
class MemristiveGateSpec:
    """Angle plus wiring of a memristive gate inside a larger register."""

    theta: float
    current_qubits: tuple[int, ...]
    resistance_qubit: int
    form: str = "two_qubit"

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "current_qubits", tuple(self.current_qubits))
        expected = {"two_qubit": 1, "three_qubit": 2}
        if self.form not in expected:
            raise SimulationError(f"unknown gate form {self.form!r}")
        if len(self.current_qubits) != expected[self.form]:
            raise SimulationError(
                f"{self.form} gate needs {expected[self.form]} current qubit(s)"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise SimulationError("memristive gate qubits must be distinct")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.current_qubits + (self.resistance_qubit,)

    def matrix(self) -> np.ndarray:
        if self.form == "two_qubit":
            return build_m_theta(self.theta)
        return build_m_tilde(self.theta)

    def apply(self, state: QuantumState) -> QuantumState:
        return apply_gate(state, self.matrix(), self.qubits)


def encoding_kraus_ops(theta: float) -> list[np.ndarray]:
    """Kraus operators ``K_eta M_theta`` of the measure-and-correct encoding gate.

    ``K_+ = |+><+| (x) I`` and ``K_- = |-><-| (x) Z``: the current qubit is
    measured in the X basis and a Z is applied to the resistance qubit on the
    ``|->`` outcome.
    """
    m = build_m_theta(theta)
    return [k @ m for k in feedback_kraus_ops()]


def feedback_kraus_ops() -> list[np.ndarray]:
    """``[K_+, K_-]`` alone, to be applied after the memristive gate."""
    k_plus = np.kron(np.outer(_PLUS, _PLUS.conj()), I2)
    k_minus = np.kron(np.outer(_MINUS, _MINUS.conj()), np.diag([1, -1]))
    return [k_plus, k_minus]


def build_encoding_channel(theta: float) -> list[np.ndarray]:
    """Two-qubit Kraus form of the encoding gate (alias of :func:`encoding_kraus_ops`)."""
    return encoding_kraus_ops(theta)


def encoding_unitary(theta: float) -> np.ndarray:
    """Coherent form: ``M_theta`` followed by a CNOT controlled by the resistance qubit.

    ``|+><+| (x) I + |-><-| (x) Z`` is exactly that CNOT, so both forms leave
    the resistance qubit in the same reduced state.
    """
    return CNOT_R_TO_C @ build_m_theta(theta)


def apply_encoding(
    state: QuantumState, theta: float, current: int, resistance: int
) -> QuantumState:
    return apply_kraus(state, encoding_kraus_ops(theta), [current, resistance])
