"""Driven memristive dynamics: hysteresis loops, LTP/LTD and state encoding.

A single resistance qubit meets a stream of freshly prepared current qubits,
one memristive gate per time step.  Everything is exact density-matrix
arithmetic; no shot sampling happens here.

Per-step observables at time ``t`` (gate ``t`` acting on ``rho_C(t)`` and the
resistance state ``rho_R(t)`` it meets):

* ``zc_in``  -- ``Tr(Z rho_C(t))`` (voltage)
* ``zr_in``  -- ``Tr(Z rho_R(t))`` (conductance before the gate)
* ``zc_out`` -- ``Tr(Z(x)I rho_out(t))`` (current)
* ``zr_out`` -- ``Tr(I(x)Z rho_out(t))`` (conductance after the gate)
* ``bloch_r`` -- Bloch vector of ``rho_R(t+1)``, the resistance state handed on
* ``fidelity`` -- ``sqrt(Tr(rho_C(t) rho_R(t+1)))`` (encoding mode only)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .memristive import build_m_theta, feedback_kraus_ops
from .sim import (
    QuantumState,
    SimulationError,
    apply_gate,
    apply_kraus,
    exp_pauli,
    expect_pauli,
    partial_trace,
)

MODES = ("plasticity", "encoding")
PLUS = QuantumState.from_label("+").to_mixed()


def _as_mixed(state) -> QuantumState:
    if not isinstance(state, QuantumState):
        state = QuantumState(state)
    return state.to_mixed()


@dataclass(frozen=True, eq=False)
class DriveSchedule:
    theta: float
    steps: tuple[QuantumState, ...]
    initial_resistance: QuantumState = PLUS
    mode: str = "plasticity"

    def __post_init__(self):
        steps = tuple(_as_mixed(s) for s in self.steps)
        if not steps:
            raise SimulationError("a drive schedule needs at least one step")
        if any(s.n_qubits != 1 for s in steps):
            raise SimulationError("current-qubit inputs must be single-qubit states")
        init = _as_mixed(self.initial_resistance)
        if init.n_qubits != 1:
            raise SimulationError("resistance state must be a single-qubit state")
        if self.mode not in MODES:
            raise SimulationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not math.isfinite(self.theta):
            raise SimulationError("theta must be finite")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "initial_resistance", init)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(eq=False)
class ExperimentTrace:
    mode: str
    zc_in: np.ndarray
    zr_in: np.ndarray
    zc_out: np.ndarray
    zr_out: np.ndarray
    bloch_r: np.ndarray  # (T, 3)
    fidelity: np.ndarray | None = None
    t: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.t is None:
            self.t = np.arange(len(self.zc_in))

    def __len__(self) -> int:
        return len(self.zc_in)

    def window(self, start: int, stop: int | None = None) -> "ExperimentTrace":
        sl = slice(start, stop)
        return ExperimentTrace(
            self.mode,
            self.zc_in[sl],
            self.zr_in[sl],
            self.zc_out[sl],
            self.zr_out[sl],
            self.bloch_r[sl],
            None if self.fidelity is None else self.fidelity[sl],
            self.t[sl],
        )

    def columns(self) -> dict[str, np.ndarray]:
        cols = {
            "t": self.t,
            "zc_in": self.zc_in,
            "zc_out": self.zc_out,
            "zr_out": self.zr_out,
            "zr_in": self.zr_in,
            "x_r": self.bloch_r[:, 0],
            "y_r": self.bloch_r[:, 1],
            "z_r": self.bloch_r[:, 2],
        }
        if self.fidelity is not None:
            cols["fidelity"] = self.fidelity
        return cols


def fidelity(rho_c: QuantumState, rho_r: QuantumState) -> float:
    """``sqrt(Tr(rho_c rho_r))`` for a pure reference ``rho_c``."""
    rho_c = _as_mixed(rho_c)
    rho_r = _as_mixed(rho_r)
    if rho_c.purity() < 1 - 1e-6:
        raise SimulationError("fidelity reference state must be pure")
    overlap = float(np.real(np.trace(rho_c.data @ rho_r.data)))
    return math.sqrt(min(max(overlap, 0.0), 1.0))


def oscillatory_states(delta_phi: float, eta, n_steps: int) -> list[QuantumState]:
    """``cos(dphi t/2)|0> + eta sin(dphi t/2)|1>`` for ``t = 0 .. n_steps-1``."""
    if eta not in (1, 1j):
        raise SimulationError(f"eta must be 1 or i, got {eta!r}")
    if n_steps < 1:
        raise SimulationError("n_steps must be at least 1")
    out = []
    for t in range(n_steps):
        half = delta_phi * t / 2
        out.append(QuantumState(np.array([math.cos(half), eta * math.sin(half)])))
    return out


def oscillatory_schedule(
    theta: float, delta_phi: float, eta, n_steps: int, mode: str = "plasticity"
) -> DriveSchedule:
    return DriveSchedule(theta, tuple(oscillatory_states(delta_phi, eta, n_steps)), mode=mode)


def constant_schedule(
    theta: float,
    state: QuantumState,
    n_steps: int,
    mode: str = "plasticity",
    initial_resistance: QuantumState = PLUS,
) -> DriveSchedule:
    return DriveSchedule(theta, (state,) * n_steps, initial_resistance, mode)


def ltp_ltd_schedule(theta: float = 7 * math.pi / 16, segment_length: int = 100) -> DriveSchedule:
    """Depression, potentiation, depression, then stochastic input, each ``segment_length`` steps."""
    labels = ["1", "0", "1", "+"]
    steps = []
    for lab in labels:
        steps.extend([QuantumState.from_label(lab)] * segment_length)
    return DriveSchedule(theta, tuple(steps))


def encoding_input(z_angle: float, x_angle: float) -> QuantumState:
    """``exp(-i z_angle Z) exp(-i x_angle X) |0>``."""
    psi = exp_pauli("Z", z_angle) @ exp_pauli("X", x_angle) @ np.array([1, 0], dtype=complex)
    return QuantumState(psi)


def run_trace(schedule: DriveSchedule) -> ExperimentTrace:
    m = build_m_theta(schedule.theta)
    feedback = feedback_kraus_ops()
    encoding = schedule.mode == "encoding"
    n = len(schedule)
    zc_in, zr_in, zc_out, zr_out = (np.empty(n) for _ in range(4))
    bloch = np.empty((n, 3))
    fid = np.empty(n) if encoding else None
    rho_r = schedule.initial_resistance
    for t, rho_c in enumerate(schedule.steps):
        zc_in[t] = expect_pauli(rho_c, "Z")
        zr_in[t] = expect_pauli(rho_r, "Z")
        rho_out = apply_gate(rho_c.tensor(rho_r), m, [0, 1])
        zc_out[t] = expect_pauli(rho_out, "ZI")
        zr_out[t] = expect_pauli(rho_out, "IZ")
        if encoding:
            rho_out = apply_kraus(rho_out, feedback, [0, 1])
        rho_r = partial_trace(rho_out, [1])
        bloch[t] = rho_r.bloch()
        if encoding:
            fid[t] = fidelity(rho_c, rho_r)
    return ExperimentTrace(schedule.mode, zc_in, zr_in, zc_out, zr_out, bloch, fid)


def steps_per_period(delta_phi: float) -> int:
    return math.ceil(2 * math.pi / abs(delta_phi))


@dataclass(eq=False)
class HysteresisLoop:
    theta: float
    delta_phi: float
    eta: complex
    trace: ExperimentTrace

    def current_voltage(self) -> np.ndarray:
        """``(zc_in, zc_out)`` pairs, shape ``(T, 2)``."""
        return np.column_stack([self.trace.zc_in, self.trace.zc_out])

    def conductance_voltage(self) -> np.ndarray:
        """``(zc_in, zr_out)`` pairs, shape ``(T, 2)``."""
        return np.column_stack([self.trace.zc_in, self.trace.zr_out])

    def last_cycle(self) -> ExperimentTrace:
        """Final ``ceil(2 pi / dphi) + 1`` points (one closed cycle)."""
        k = steps_per_period(self.delta_phi) + 1
        return self.trace.window(max(len(self.trace) - k, 0))


def hysteresis_loop(
    theta: float,
    delta_phi: float,
    eta=1,
    n_periods: int = 10,
    extra_steps: int = 0,
) -> HysteresisLoop:
    """Drive ``n_periods`` full voltage cycles (``t < n_periods * 2pi/dphi``).

    ``extra_steps`` appends steps past the last full cycle, e.g. 2 to close
    the final cycle at ``dphi = pi/4``.  Closed loops need ``2 pi / dphi`` to
    be an integer; this is not enforced.
    """
    if n_periods < 1:
        raise SimulationError("n_periods must be at least 1")
    if delta_phi == 0:
        raise SimulationError("delta_phi = 0 has no period; use oscillatory_schedule")
    n_steps = int(round(n_periods * 2 * math.pi / abs(delta_phi))) + extra_steps
    schedule = oscillatory_schedule(theta, delta_phi, eta, n_steps)
    return HysteresisLoop(theta, delta_phi, eta, run_trace(schedule))


def hysteresis_segments(
    loop: HysteresisLoop,
    starts: Sequence[int] | None = None,
    segment_length: int = 3,
) -> list[ExperimentTrace]:
    """Re-run short segments of a loop from the numerically prepared resistance state.

    Mirrors a device with only a few couplings per qubit: each segment starts
    at ``t = s`` from ``rho_R(s)`` and applies ``segment_length`` gates.  The
    default starts are ``T-P+1, T-P+3, ...`` for the last cycle of a run of
    ``T + 2`` steps with period ``P``, i.e. ``T-7, T-5, T-3, T-1`` at
    ``dphi = pi/4``.  Run noiselessly, every segment reproduces the full
    trace at the same times.
    """
    trace = loop.trace
    period = steps_per_period(loop.delta_phi)
    if starts is None:
        total = len(trace) - 2
        starts = list(range(total - period + 1, total, 2))
    states = oscillatory_states(loop.delta_phi, loop.eta, len(trace))
    out = []
    for s in starts:
        if s < 0 or s + segment_length > len(trace):
            raise SimulationError(f"segment starting at {s} leaves the trace")
        if s == 0:
            init = PLUS
        else:
            init = QuantumState.from_bloch(trace.bloch_r[s - 1])
        sched = DriveSchedule(loop.theta, tuple(states[s : s + segment_length]), init)
        seg = run_trace(sched)
        seg.t = np.arange(s, s + segment_length)
        out.append(seg)
    return out
