"""Universal-gate constructions built from network connections.

A connection ``(current, resistance, phi, theta)`` applies
``R_y(phi) = exp(-i phi/2 Y)`` to the current qubit and then ``M_theta`` on the
pair, exactly as one network connection does.  Current qubits start in
``|0>`` and resistance qubits in ``|+>`` unless they carry logical input.

Qubits are referenced as ``("C", k)`` or ``("R", k)`` with 0-based ``k``; the
simulated register lists all currents first, then all resistances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .memristive import build_m_theta
from .sim import (
    CNOT,
    QuantumState,
    SimulationError,
    apply_gate,
    equal_up_to_global_phase,
    random_pure_state,
    ry,
    rz,
)

ATOL = 1e-10
_KET = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
}

QubitRef = tuple[str, int]


@dataclass(frozen=True)
class Connection:
    current: int
    resistance: int
    phi: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True, eq=False)
class ConnectionProgram:
    """Time-ordered connections plus the logical interface they implement.

    ``inputs``/``outputs`` list the qubits carrying the logical register before
    and after the program.  ``final_states`` gives the fixed single-qubit state
    (a label from ``0 1 + -``) every non-output qubit ends in.  ``target`` is
    the logical unitary the program should realize up to global phase.
    """

    name: str
    n_currents: int
    n_resistances: int
    connections: tuple[Connection, ...]
    inputs: tuple[QubitRef, ...]
    outputs: tuple[QubitRef, ...]
    final_states: tuple[tuple[QubitRef, str], ...]
    target: np.ndarray
    visit_once: bool = False

    def __post_init__(self):
        object.__setattr__(self, "connections", tuple(self.connections))
        object.__setattr__(self, "inputs", tuple(tuple(q) for q in self.inputs))
        object.__setattr__(self, "outputs", tuple(tuple(q) for q in self.outputs))
        object.__setattr__(
            self, "final_states", tuple((tuple(q), s) for q, s in self.final_states)
        )
        target = np.asarray(self.target, dtype=complex)
        object.__setattr__(self, "target", target)
        for c in self.connections:
            if not (0 <= c.current < self.n_currents and 0 <= c.resistance < self.n_resistances):
                raise SimulationError(f"connection {c} references a missing qubit")
        for q in self.inputs + self.outputs + tuple(q for q, _ in self.final_states):
            self.index(q)
        if len(self.inputs) != len(self.outputs):
            raise SimulationError("programs must map k logical qubits to k logical qubits")
        if target.shape != (2 ** len(self.inputs),) * 2:
            raise SimulationError("target size does not match the logical register")
        covered = set(self.outputs) | {q for q, _ in self.final_states}
        if len(covered) != self.n_qubits or set(self.outputs) & {q for q, _ in self.final_states}:
            raise SimulationError("every qubit must be either an output or have a final state")
        if self.visit_once:
            pairs = [(c.current, c.resistance) for c in self.connections]
            if len(set(pairs)) != len(pairs):
                raise SimulationError("visit-once program repeats a current/resistance pair")

    @property
    def n_qubits(self) -> int:
        return self.n_currents + self.n_resistances

    def index(self, ref: QubitRef) -> int:
        kind, k = ref
        if kind == "C" and 0 <= k < self.n_currents:
            return k
        if kind == "R" and 0 <= k < self.n_resistances:
            return self.n_currents + k
        raise SimulationError(f"no qubit {ref}")

    def to_dict(self) -> dict:
        def cplx(z):
            return {"re": float(z.real), "im": float(z.imag)}

        return {
            "name": self.name,
            "n_currents": self.n_currents,
            "n_resistances": self.n_resistances,
            "visit_once": self.visit_once,
            "connections": [
                {"current": c.current, "resistance": c.resistance, "phi": c.phi, "theta": c.theta}
                for c in self.connections
            ],
            "inputs": [list(q) for q in self.inputs],
            "outputs": [list(q) for q in self.outputs],
            "final_states": [[list(q), s] for q, s in self.final_states],
            "target": [[cplx(z) for z in row] for row in self.target],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ConnectionProgram":
        target = np.array([[z["re"] + 1j * z["im"] for z in row] for row in doc["target"]])
        return cls(
            doc["name"],
            doc["n_currents"],
            doc["n_resistances"],
            tuple(Connection(**c) for c in doc["connections"]),
            tuple(tuple(q) for q in doc["inputs"]),
            tuple(tuple(q) for q in doc["outputs"]),
            tuple((tuple(q), s) for q, s in doc["final_states"]),
            target,
            doc["visit_once"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ConnectionProgram":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ResourceCount:
    currents: int
    resistances: int
    ancilla_resistances: int
    connections: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.currents, self.resistances, self.connections)


def single_qubit_target(phi: float, theta: float) -> np.ndarray:
    """``exp(-i theta/2 Z) exp(-i phi/2 Y)``."""
    return rz(theta) @ ry(phi)


def compile_write() -> ConnectionProgram:
    """``M_0 |psi>_C |+>_R = |+>_C |psi>_R``."""
    return ConnectionProgram(
        "write", 1, 1, (Connection(0, 0),),
        inputs=(("C", 0),), outputs=(("R", 0),),
        final_states=((("C", 0), "+"),),
        target=np.eye(2),
    )


def compile_read() -> ConnectionProgram:
    """``M_0 |0>_C |psi>_R = |psi>_C |0>_R``; the resistance needs re-initialising before reuse."""
    return ConnectionProgram(
        "read", 1, 1, (Connection(0, 0),),
        inputs=(("R", 0),), outputs=(("C", 0),),
        final_states=((("R", 0), "0"),),
        target=np.eye(2),
    )


def compile_single_qubit(phi: float, theta: float, visit_once: bool = False) -> ConnectionProgram:
    """Program applying ``exp(-i theta/2 Z) exp(-i phi/2 Y)`` to a logical resistance qubit.

    The plain form reads the qubit into one current and visits the same
    resistance twice more.  The visit-once form spends three currents and two
    ancilla resistances and leaves the result on ancilla ``R1``.
    """
    target = single_qubit_target(phi, theta)
    if not visit_once:
        conns = (Connection(0, 0), Connection(0, 0, phi, 0.0), Connection(0, 0, 0.0, theta))
        return ConnectionProgram(
            "single_qubit", 1, 1, conns,
            inputs=(("R", 0),), outputs=(("R", 0),),
            final_states=((("C", 0), "0"),),
            target=target,
        )
    conns = (
        Connection(0, 1),              # C0 reads the fresh R1, leaving it in |0>
        Connection(1, 0),              # C1 reads the logical qubit
        Connection(1, 1, phi, 0.0),    # R_y(phi) on C1, then M_0 correlates C1 with R1
        Connection(1, 2),              # C1 writes its half into the fresh R2
        Connection(2, 2),              # C2 reads R2
        Connection(2, 1, 0.0, theta),  # C2 meets R1 with M_theta: disentangles and applies the Z rotation
    )
    return ConnectionProgram(
        "single_qubit_visit_once", 3, 3, conns,
        inputs=(("R", 0),), outputs=(("R", 1),),
        final_states=(
            (("C", 0), "+"), (("C", 1), "+"), (("C", 2), "0"),
            (("R", 0), "0"), (("R", 2), "0"),
        ),
        target=target,
        visit_once=True,
    )


def compile_cnot() -> ConnectionProgram:
    """``|Psi>_{12} |+>_3 -> |0>_1 CNOT|Psi>_{23}`` with qubit 2 as control.

    One current reads R0, passes through R1 with ``M_0`` and writes into the
    fresh R2.
    """
    return ConnectionProgram(
        "cnot", 1, 3, (Connection(0, 0), Connection(0, 1), Connection(0, 2)),
        inputs=(("R", 0), ("R", 1)), outputs=(("R", 1), ("R", 2)),
        final_states=((("C", 0), "+"), (("R", 0), "0")),
        target=CNOT,
        visit_once=True,
    )


def resource_count(program: ConnectionProgram) -> ResourceCount:
    used_c = {c.current for c in program.connections}
    used_r = {c.resistance for c in program.connections}
    logical = {k for kind, k in program.inputs if kind == "R"}
    return ResourceCount(
        currents=len(used_c),
        resistances=len(used_r),
        ancilla_resistances=len(used_r - logical),
        connections=len(program.connections),
    )


def _initial_state(program: ConnectionProgram, logical: np.ndarray) -> np.ndarray:
    """Full register state with the logical vector placed on the input qubits."""
    n = program.n_qubits
    fresh = [_KET["0"]] * program.n_currents + [_KET["+"]] * program.n_resistances
    in_idx = [program.index(q) for q in program.inputs]
    rest = [i for i in range(n) if i not in in_idx]
    psi = logical.reshape([2] * len(in_idx))
    for i in rest:
        psi = np.multiply.outer(psi, fresh[i])
    return np.moveaxis(psi, range(n), in_idx + rest).reshape(-1)


def simulate_program(program: ConnectionProgram, logical_input) -> QuantumState:
    """Run the program on a logical input vector; returns the full register state."""
    logical = np.asarray(
        logical_input.data if isinstance(logical_input, QuantumState) else logical_input,
        dtype=complex,
    )
    if logical.shape != (2 ** len(program.inputs),):
        raise SimulationError("logical input has the wrong dimension")
    state = QuantumState(_initial_state(program, logical))
    for c in program.connections:
        i, j = program.index(("C", c.current)), program.index(("R", c.resistance))
        state = apply_gate(state, ry(c.phi), [i])
        state = apply_gate(state, build_m_theta(c.theta), [i, j])
    return state


def expected_output(program: ConnectionProgram, logical_input) -> np.ndarray:
    """Full register state the program should produce, with no phase freedom removed."""
    logical = np.asarray(
        logical_input.data if isinstance(logical_input, QuantumState) else logical_input,
        dtype=complex,
    )
    out = program.target @ logical
    out_idx = [program.index(q) for q in program.outputs]
    junk_idx = [program.index(q) for q, _ in program.final_states]
    psi = out.reshape([2] * len(out_idx))
    for _, label in program.final_states:
        psi = np.multiply.outer(psi, _KET[label])
    return np.moveaxis(psi, range(program.n_qubits), out_idx + junk_idx).reshape(-1)


def logical_map(program: ConnectionProgram) -> np.ndarray:
    """Matrix the program induces on the logical register.

    Each basis input is simulated and projected onto the expected final
    states of the non-output qubits.  A column norm below one means those
    qubits did not end where the program claims.
    """
    k = len(program.inputs)
    cols = []
    for b in range(2**k):
        e = np.zeros(2**k, dtype=complex)
        e[b] = 1
        full = simulate_program(program, e).data
        out_idx = [program.index(q) for q in program.outputs]
        junk_idx = [program.index(q) for q, _ in program.final_states]
        psi = np.moveaxis(full.reshape([2] * program.n_qubits), out_idx + junk_idx, range(program.n_qubits))
        for _, label in reversed(program.final_states):
            psi = psi @ _KET[label].conj()
        cols.append(psi.reshape(-1))
    return np.array(cols).T


def verify_program(
    program: ConnectionProgram, n_random: int = 20, seed: int = 0, atol: float = ATOL
) -> bool:
    """Check the full output state on every basis input and ``n_random`` random inputs."""
    k = len(program.inputs)
    rng = np.random.default_rng(seed)
    inputs = list(np.eye(2**k, dtype=complex))
    inputs += [random_pure_state(k, rng).data for _ in range(n_random)]
    for v in inputs:
        got = simulate_program(program, v).data
        if not equal_up_to_global_phase(got, expected_output(program, v), atol):
            return False
    # one common phase across all inputs, not just per input
    return equal_up_to_global_phase(logical_map(program), program.target, atol)
