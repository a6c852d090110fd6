"""Dense state-vector and density-matrix simulation for a few qubits.

Ordering convention (used everywhere in the package): qubit 0 is the most
significant tensor factor, so the basis index of ``|b0 b1 ... b(n-1)>`` is
``sum(b_q * 2**(n-1-q))``.  For a memristive gate this puts the current qubit
before the resistance qubit, matching the usual ``|c>|r>`` basis listing.

States are immutable: every operation returns a new :class:`QuantumState`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

# control is the first (more significant) qubit
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class SimulationError(ValueError):
    """Invalid state, gate or qubit targets."""


def exp_pauli(pauli: str, angle: float) -> np.ndarray:
    """Return ``exp(-i * angle * P)`` for a single-qubit Pauli ``P``."""
    return np.cos(angle) * I2 - 1j * np.sin(angle) * PAULI[pauli]


def rx(angle: float) -> np.ndarray:
    return exp_pauli("X", angle / 2)


def ry(angle: float) -> np.ndarray:
    return exp_pauli("Y", angle / 2)


def rz(angle: float) -> np.ndarray:
    return exp_pauli("Z", angle / 2)


def controlled(u: np.ndarray) -> np.ndarray:
    """Controlled-``u`` with the control as the most significant qubit."""
    d = u.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = u
    return out


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0)


def normalize_global_phase(u: np.ndarray) -> np.ndarray:
    """Divide out the phase of the largest-magnitude entry."""
    u = np.asarray(u, dtype=complex)
    flat = u.ravel()
    # ties between equal-magnitude entries are broken by a fixed scan order
    idx = int(np.argmax(np.round(np.abs(flat), 12)))
    return u * np.exp(-1j * np.angle(flat[idx]))


def equal_up_to_global_phase(a, b, atol: float = ATOL) -> bool:
    """True when ``a = exp(i*alpha) * b`` for some real ``alpha``.

    Works for state vectors and matrices alike.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    flat_b = b.ravel()
    idx = int(np.argmax(np.abs(flat_b)))
    if abs(flat_b[idx]) < atol:
        return np.allclose(a, b, atol=atol, rtol=0)
    ref = a.ravel()[idx]
    if abs(ref) < atol:
        return False
    phase = ref / abs(ref) * abs(flat_b[idx]) / flat_b[idx]
    return np.allclose(a, phase * b, atol=atol, rtol=0)


def _n_qubits_for(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise SimulationError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure (vector) or mixed (density matrix) state of ``n_qubits`` qubits."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex)
        if arr.ndim == 1:
            _n_qubits_for(arr.shape[0])
            norm = np.vdot(arr, arr).real
            if abs(norm - 1) > ATOL:
                raise SimulationError(f"state vector norm {norm} != 1")
        elif arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
            _n_qubits_for(arr.shape[0])
            if not np.allclose(arr, arr.conj().T, atol=ATOL, rtol=0):
                raise SimulationError("density matrix is not Hermitian")
            tr = np.trace(arr).real
            if abs(tr - 1) > ATOL:
                raise SimulationError(f"density matrix trace {tr} != 1")
            if np.linalg.eigvalsh(arr).min() < -1e-9:
                raise SimulationError("density matrix has negative eigenvalues")
        else:
            raise SimulationError(f"bad state shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_label(cls, label: str) -> "QuantumState":
        """Product state from characters in ``{0, 1, +, -}``, e.g. ``"0+1"``."""
        kets = {
            "0": np.array([1, 0], dtype=complex),
            "1": np.array([0, 1], dtype=complex),
            "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
            "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
        }
        try:
            vecs = [kets[ch] for ch in label]
        except KeyError as exc:
            raise SimulationError(f"unknown state label {label!r}") from exc
        if not vecs:
            raise SimulationError("empty state label")
        out = vecs[0]
        for v in vecs[1:]:
            out = np.kron(out, v)
        return cls(out)

    @classmethod
    def from_bloch(cls, vector: Sequence[float]) -> "QuantumState":
        x, y, z = vector
        rho = 0.5 * (I2 + x * X + y * Y + z * Z)
        return cls(rho)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.data.shape[0])

    @property
    def is_pure(self) -> bool:
        """True for the vector representation (not a purity test)."""
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data.copy()

    def to_mixed(self) -> "QuantumState":
        return self if not self.is_pure else QuantumState(self.density_matrix())

    def purity(self) -> float:
        if self.is_pure:
            return 1.0
        return float(np.real(np.trace(self.data @ self.data)))

    def bloch(self) -> np.ndarray:
        """Bloch vector ``(<X>, <Y>, <Z>)`` of a single-qubit state."""
        if self.n_qubits != 1:
            raise SimulationError("Bloch vector is defined for one qubit only")
        return np.array([expect_pauli(self, p) for p in "XYZ"])

    def tensor(self, other: "QuantumState") -> "QuantumState":
        if self.is_pure and other.is_pure:
            return QuantumState(np.kron(self.data, other.data))
        return QuantumState(np.kron(self.density_matrix(), other.density_matrix()))

    def fidelity_with_pure(self, other: "QuantumState") -> float:
        """``<psi|rho|psi>`` where ``other`` is a pure vector state."""
        if not other.is_pure:
            raise SimulationError("reference state must be a vector")
        psi = other.data
        return float(np.real(np.vdot(psi, self.density_matrix() @ psi)))


def tensor(*states: QuantumState) -> QuantumState:
    out = states[0]
    for s in states[1:]:
        out = out.tensor(s)
    return out


def _check_targets(targets: Sequence[int], n: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise SimulationError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise SimulationError(f"target qubit {t} out of range for {n} qubits")
    return targets


def _apply_to_axes(tensor_: np.ndarray, gate: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, tensor_, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_gate(state: QuantumState, gate, targets: Sequence[int]) -> QuantumState:
    """Apply ``gate`` to the ordered ``targets`` (first target = most significant)."""
    gate = np.asarray(gate, dtype=complex)
    n = state.n_qubits
    targets = _check_targets(targets, n)
    if gate.shape != (2 ** len(targets),) * 2:
        raise SimulationError(
            f"gate of shape {gate.shape} does not match {len(targets)} targets"
        )
    if not is_unitary(gate):
        raise SimulationError("gate is not unitary")
    if state.is_pure:
        psi = _apply_to_axes(state.data.reshape((2,) * n), gate, targets)
        return QuantumState(psi.reshape(-1))
    rho = state.data.reshape((2,) * (2 * n))
    rho = _apply_to_axes(rho, gate, targets)
    rho = _apply_to_axes(rho, gate.conj(), [n + t for t in targets])
    rho = rho.reshape(2**n, 2**n)
    return QuantumState(0.5 * (rho + rho.conj().T))


def apply_kraus(
    state: QuantumState, kraus_ops: Iterable, targets: Sequence[int]
) -> QuantumState:
    """Apply the channel ``rho -> sum_K K rho K^dagger`` on ``targets``.

    The operator set must be trace preserving within 1e-10.
    """
    ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
    if not ops:
        raise SimulationError("empty Kraus operator list")
    n = state.n_qubits
    targets = _check_targets(targets, n)
    dim = 2 ** len(targets)
    for k in ops:
        if k.shape != (dim, dim):
            raise SimulationError(f"Kraus operator shape {k.shape} != {(dim, dim)}")
    completeness = sum(k.conj().T @ k for k in ops)
    if not np.allclose(completeness, np.eye(dim), atol=ATOL, rtol=0):
        raise SimulationError("Kraus operators are not trace preserving")
    rho_t = state.density_matrix().reshape((2,) * (2 * n))
    out = np.zeros_like(rho_t)
    for k in ops:
        term = _apply_to_axes(rho_t, k, targets)
        out += _apply_to_axes(term, k.conj(), [n + t for t in targets])
    out = out.reshape(2**n, 2**n)
    return QuantumState(0.5 * (out + out.conj().T))


def partial_trace(state: QuantumState, keep: Sequence[int]) -> QuantumState:
    """Reduced density matrix on ``keep``, in the order given."""
    n = state.n_qubits
    if len(keep) == 0:
        raise SimulationError("keep list must be nonempty")
    keep = _check_targets(keep, n)
    rest = [q for q in range(n) if q not in keep]
    dk = 2 ** len(keep)
    if state.is_pure:
        psi = np.transpose(state.data.reshape((2,) * n), keep + rest).reshape(dk, -1)
        rho = psi @ psi.conj().T
    else:
        rho = state.data.reshape((2,) * (2 * n))
        rho = np.transpose(rho, keep + rest + [n + q for q in keep] + [n + q for q in rest])
        dr = 2 ** len(rest)
        rho = np.einsum("arbr->ab", rho.reshape(dk, dr, dk, dr))
    return QuantumState(0.5 * (rho + rho.conj().T))


def expect_pauli(state: QuantumState, pauli_string: str) -> float:
    """``Tr(P rho)`` for a Pauli string such as ``"ZI"`` (one letter per qubit)."""
    n = state.n_qubits
    if len(pauli_string) != n:
        raise SimulationError(
            f"Pauli string {pauli_string!r} has length {len(pauli_string)}, expected {n}"
        )
    if any(p not in PAULI for p in pauli_string):
        raise SimulationError(f"invalid Pauli string {pauli_string!r}")
    if state.is_pure:
        psi = state.data.reshape((2,) * n)
        out = psi
        for q, p in enumerate(pauli_string):
            if p != "I":
                out = _apply_to_axes(out, PAULI[p], [q])
        value = np.vdot(psi.reshape(-1), out.reshape(-1))
    else:
        rho = state.data.reshape((2,) * (2 * n))
        out = rho
        for q, p in enumerate(pauli_string):
            if p != "I":
                out = _apply_to_axes(out, PAULI[p], [q])
        value = np.trace(out.reshape(2**n, 2**n))
    return float(np.real(value))


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> QuantumState:
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return QuantumState(v / np.linalg.norm(v))


def random_density_matrix(
    n_qubits: int, rng: np.random.Generator, rank: int | None = None
) -> QuantumState:
    d = 2**n_qubits
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return QuantumState(0.5 * (rho + rho.conj().T))
