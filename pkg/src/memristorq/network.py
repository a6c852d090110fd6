"""Three-layer memristive neural network.

``M`` input (current) qubits feed ``N`` hidden (resistance) qubits through
time-ordered connections.  Connection ``i`` joining input ``a`` to hidden
``b`` applies ``R_y(phi_i) = exp(-i phi_i/2 Y)`` to input ``a`` and then the
memristive gate ``M_{theta_i}`` with ``a`` as the current qubit.  After all
connections, hidden qubit ``j`` gets ``R_y(phi_{K+j})`` (``K`` = number of
connections) and is measured in the Z basis.

Conventions:

* labels ``i``, ``a`` and ``b`` are 1-based as in the usual network notation;
* the simulated register is ``inputs (x) hidden`` with input 1 most significant;
* outcome bit ``mu_j = 0`` means eigenvalue ``+1`` of ``Z``; outcome strings
  are indexed with ``mu_1`` as the most significant bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .sim import QuantumState, SimulationError


def connection_gates(phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Stack of ``M_theta (R_y(phi) (x) I)`` matrices, shape ``(K, 4, 4)``."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    k = len(theta)
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * theta)
    m = np.zeros((k, 4, 4), dtype=complex)
    m[:, 0, 0] = 1
    m[:, 1, 3] = e
    m[:, 2, 1] = c
    m[:, 2, 2] = 1j * s
    m[:, 3, 1] = 1j * np.conj(e) * s
    m[:, 3, 2] = np.conj(e) * c
    cp, sp = np.cos(phi / 2), np.sin(phi / 2)
    ry = np.zeros((k, 4, 4))
    for d in range(4):
        ry[:, d, d] = cp
    ry[:, 0, 2] = ry[:, 1, 3] = -sp
    ry[:, 2, 0] = ry[:, 3, 1] = sp
    return m @ ry


@numba.njit(cache=True, nogil=True)
def _run_network(psi, gates, cur, hid, out_rot, n_hidden):
    """Apply all connections and output rotations in place; return marginals."""
    n_batch, dim = psi.shape
    nq = int(np.log2(dim))
    for g in range(gates.shape[0]):
        u = gates[g]
        sa = 1 << (nq - 1 - cur[g])
        sb = 1 << (nq - 1 - hid[g])
        for x in range(n_batch):
            for k in range(dim):
                if (k & sa) or (k & sb):
                    continue
                k1 = k | sb
                k2 = k | sa
                k3 = k2 | sb
                v0 = psi[x, k]
                v1 = psi[x, k1]
                v2 = psi[x, k2]
                v3 = psi[x, k3]
                psi[x, k] = u[0, 0] * v0 + u[0, 1] * v1 + u[0, 2] * v2 + u[0, 3] * v3
                psi[x, k1] = u[1, 0] * v0 + u[1, 1] * v1 + u[1, 2] * v2 + u[1, 3] * v3
                psi[x, k2] = u[2, 0] * v0 + u[2, 1] * v1 + u[2, 2] * v2 + u[2, 3] * v3
                psi[x, k3] = u[3, 0] * v0 + u[3, 1] * v1 + u[3, 2] * v2 + u[3, 3] * v3
    for j in range(n_hidden):
        r = out_rot[j]
        sb = 1 << (n_hidden - 1 - j)
        for x in range(n_batch):
            for k in range(dim):
                if k & sb:
                    continue
                v0 = psi[x, k]
                v1 = psi[x, k | sb]
                psi[x, k] = r[0, 0] * v0 + r[0, 1] * v1
                psi[x, k | sb] = r[1, 0] * v0 + r[1, 1] * v1
    out = np.zeros((n_batch, 1 << n_hidden))
    mask = (1 << n_hidden) - 1
    for x in range(n_batch):
        for k in range(dim):
            v = psi[x, k]
            out[x, k & mask] += v.real * v.real + v.imag * v.imag
    return out


@dataclass(eq=False)
class NetworkSpec:
    """Layer sizes, ordered connections ``(i, a, b)`` and parameters."""

    m: int
    n: int
    connections: list[tuple[int, int, int]]
    phi: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise SimulationError("layer sizes must be positive")
        conns = sorted((int(i), int(a), int(b)) for i, a, b in self.connections)
        if [c[0] for c in conns] != list(range(1, len(conns) + 1)):
            raise SimulationError("connection labels must be 1..K without gaps")
        for i, a, b in conns:
            if not (1 <= a <= self.m and 1 <= b <= self.n):
                raise SimulationError(f"connection {i} joins ({a}, {b}) outside the layers")
        self.connections = conns
        self.phi = np.asarray(self.phi, dtype=float).copy()
        self.theta = np.asarray(self.theta, dtype=float).copy()
        k = len(conns)
        if self.phi.shape != (k + self.n,):
            raise SimulationError(f"phi must have {k + self.n} entries, got {self.phi.size}")
        if self.theta.shape != (k,):
            raise SimulationError(f"theta must have {k} entries, got {self.theta.size}")

    @classmethod
    def fully_connected(cls, m: int, n: int, phi=None, theta=None) -> "NetworkSpec":
        """All ``m*n`` connections ordered by ``i = n*(a-1) + b``."""
        conns = [(n * (a - 1) + b, a, b) for a in range(1, m + 1) for b in range(1, n + 1)]
        phi = np.zeros((m + 1) * n) if phi is None else phi
        theta = np.zeros(m * n) if theta is None else theta
        return cls(m, n, conns, phi, theta)

    @property
    def n_connections(self) -> int:
        return len(self.connections)

    def with_parameters(self, phi, theta) -> "NetworkSpec":
        return NetworkSpec(self.m, self.n, list(self.connections), phi, theta)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "connections": [list(c) for c in self.connections],
            "phi": self.phi.tolist(),
            "theta": self.theta.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NetworkSpec":
        return cls(doc["m"], doc["n"], [tuple(c) for c in doc["connections"]], doc["phi"], doc["theta"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "NetworkSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probabilities of the ``2**n`` hidden-layer outcome strings."""

    probs: np.ndarray
    n: int = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).copy()
        n = self.n if self.n is not None else int(round(np.log2(p.size)))
        if p.shape != (2**n,):
            raise SimulationError(f"{p.size} probabilities do not cover {n} bits")
        if p.min() < -1e-12 or abs(p.sum() - 1) > 1e-10:
            raise SimulationError("probabilities must be nonnegative and sum to 1")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "n", n)

    def __getitem__(self, bits: str) -> float:
        if len(bits) != self.n or set(bits) - {"0", "1"}:
            raise KeyError(bits)
        return float(self.probs[int(bits, 2)])

    def as_dict(self) -> dict[str, float]:
        return {format(k, f"0{self.n}b"): float(v) for k, v in enumerate(self.probs)}

    def sample(self, shots: int, rng: np.random.Generator) -> "OutcomeDistribution":
        """Empirical distribution of ``shots`` multinomial draws."""
        counts = rng.multinomial(shots, self.probs / self.probs.sum())
        return OutcomeDistribution(counts / shots, self.n)


def distribution_distance(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """Trace (total-variation) distance ``0.5 * sum |p - q|``."""
    pp = p.probs if isinstance(p, OutcomeDistribution) else np.asarray(p, dtype=float)
    qq = q.probs if isinstance(q, OutcomeDistribution) else np.asarray(q, dtype=float)
    if pp.shape != qq.shape:
        raise SimulationError("distributions have different sizes")
    return float(0.5 * np.abs(pp - qq).sum())


class NetworkSimulator:
    """Reusable exact simulator for one network layout and fixed pure inputs.

    ``inputs`` is an array of shape ``(B, 2**m)``; :meth:`probabilities`
    returns the ``(B, 2**n)`` outcome distributions for given parameters.
    """

    def __init__(self, spec: NetworkSpec, inputs: np.ndarray):
        self.m, self.n = spec.m, spec.n
        self.k = spec.n_connections
        order = [(a - 1, self.m + b - 1) for _, a, b in spec.connections]
        self._cur = np.array([c for c, _ in order], dtype=np.int64)
        self._hid = np.array([h for _, h in order], dtype=np.int64)
        inputs = np.atleast_2d(np.asarray(inputs, dtype=complex))
        if inputs.shape[1] != 2**self.m:
            raise SimulationError(f"inputs must have dimension {2**self.m}")
        hidden = np.full(2**self.n, 2 ** (-self.n / 2), dtype=complex)
        self._psi0 = np.ascontiguousarray(np.einsum("bi,j->bij", inputs, hidden).reshape(len(inputs), -1))

    def probabilities(self, phi, theta) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if phi.shape != (self.k + self.n,) or theta.shape != (self.k,):
            raise SimulationError("parameter lengths do not match the network")
        gates = connection_gates(phi[: self.k], theta)
        c, s = np.cos(phi[self.k :] / 2), np.sin(phi[self.k :] / 2)
        rot = np.empty((self.n, 2, 2), dtype=complex)
        rot[:, 0, 0] = c
        rot[:, 0, 1] = -s
        rot[:, 1, 0] = s
        rot[:, 1, 1] = c
        psi = self._psi0.copy()
        return _run_network(psi, gates, self._cur, self._hid, rot, self.n)


def _input_ensemble(state: QuantumState, m: int) -> tuple[np.ndarray, np.ndarray]:
    if state.n_qubits != m:
        raise SimulationError(f"input state has {state.n_qubits} qubits, network expects {m}")
    if state.is_pure:
        return np.ones(1), state.data[None, :]
    w, v = np.linalg.eigh(state.data)
    keep = w > 1e-14
    return w[keep], v[:, keep].T


def forward(spec: NetworkSpec, input_state: QuantumState) -> OutcomeDistribution:
    """Exact outcome distribution for one input state (pure or mixed)."""
    weights, vectors = _input_ensemble(input_state, spec.m)
    probs = NetworkSimulator(spec, vectors).probabilities(spec.phi, spec.theta)
    p = weights @ probs
    return OutcomeDistribution(p / p.sum(), spec.n)


def z_measurement_distribution(state: QuantumState) -> OutcomeDistribution:
    """Direct computational-basis measurement of every qubit."""
    if state.is_pure:
        p = np.abs(state.data) ** 2
    else:
        p = np.real(np.diag(state.data))
    return OutcomeDistribution(p / p.sum(), state.n_qubits)
