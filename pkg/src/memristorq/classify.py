"""Quantum state classification with the memristive network.

The network is trained to make the hidden-layer outcome distributions of the
class states as different as possible: the objective is the sum of pairwise
trace distances over unordered class pairs, maximised by Nelder-Mead with
random restarts.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .network import NetworkSimulator, NetworkSpec, z_measurement_distribution, distribution_distance
from .sim import QuantumState, SimulationError

_SQRT_HALF = 1 / math.sqrt(2)
_BELL = {
    "bell1": [_SQRT_HALF, 0, 0, _SQRT_HALF],
    "bell2": [_SQRT_HALF, 0, 0, -_SQRT_HALF],
    "bell3": [0, _SQRT_HALF, _SQRT_HALF, 0],
    "bell4": [0, _SQRT_HALF, -_SQRT_HALF, 0],
}


def prepare_class_state(kind: str, m: int | None = None) -> QuantumState:
    """``bell1``..``bell4`` (two qubits), ``ghz`` or ``plus`` on ``m`` qubits."""
    if kind in _BELL:
        if m not in (None, 2):
            raise SimulationError("Bell states are two-qubit states")
        return QuantumState(np.array(_BELL[kind], dtype=complex))
    if kind not in ("ghz", "plus"):
        raise SimulationError(f"unknown class state {kind!r}")
    if m is None or m < 1:
        raise SimulationError(f"{kind} needs a qubit count m >= 1")
    if kind == "plus":
        return QuantumState(np.full(2**m, 2 ** (-m / 2), dtype=complex))
    v = np.zeros(2**m, dtype=complex)
    v[0] = v[-1] = _SQRT_HALF
    return QuantumState(v)


def quantum_upper_bound(state_a: QuantumState, state_b: QuantumState) -> float:
    """Trace distance ``sqrt(1 - |<a|b>|^2)`` of two pure states."""
    if not (state_a.is_pure and state_b.is_pure):
        raise SimulationError("quantum_upper_bound needs pure states")
    if state_a.dim != state_b.dim:
        raise SimulationError("states have different dimensions")
    overlap = abs(np.vdot(state_a.data, state_b.data)) ** 2
    return math.sqrt(max(1.0 - overlap, 0.0))


def classical_baseline(m: int) -> float:
    """Distance between direct Z-basis outcome distributions of ``ghz(m)`` and ``plus(m)``."""
    if m < 1:
        raise SimulationError("m must be at least 1")
    return 1.0 - 1.0 / 2 ** (m - 1)


def direct_z_distance(state_a: QuantumState, state_b: QuantumState) -> float:
    """Same quantity as :func:`classical_baseline`, from explicit distributions."""
    return distribution_distance(z_measurement_distribution(state_a), z_measurement_distribution(state_b))


def _state_to_json(state: QuantumState) -> list[dict]:
    return [{"re": float(z.real), "im": float(z.imag)} for z in state.data]


@dataclass(eq=False)
class ClassificationTask:
    class_states: list[QuantumState]
    network: NetworkSpec
    frozen_phi: bool = False

    def __post_init__(self):
        self.class_states = list(self.class_states)
        if len(self.class_states) < 2:
            raise SimulationError("classification needs at least two classes")
        for s in self.class_states:
            if not s.is_pure:
                raise SimulationError("class states must be pure")
            if s.n_qubits != self.network.m:
                raise SimulationError(
                    f"class state has {s.n_qubits} qubits, network has {self.network.m} inputs"
                )
        self._sim = NetworkSimulator(self.network, np.array([s.data for s in self.class_states]))
        self._pairs = list(itertools.combinations(range(len(self.class_states)), 2))
        self.ceiling = sum(
            quantum_upper_bound(self.class_states[i], self.class_states[j]) for i, j in self._pairs
        )

    @property
    def n_phi(self) -> int:
        return self.network.n_connections + self.network.n

    @property
    def n_theta(self) -> int:
        return self.network.n_connections

    @property
    def n_params(self) -> int:
        """Length of the optimised vector: ``theta`` only when ``phi`` is frozen."""
        return self.n_theta if self.frozen_phi else self.n_phi + self.n_theta

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Optimiser vector -> ``(phi, theta)``."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise SimulationError(f"expected {self.n_params} parameters, got {x.size}")
        if self.frozen_phi:
            return np.zeros(self.n_phi), x
        return x[: self.n_phi], x[self.n_phi :]

    def distributions(self, phi, theta) -> np.ndarray:
        return self._sim.probabilities(phi, theta)

    def to_dict(self) -> dict:
        return {
            "class_states": [_state_to_json(s) for s in self.class_states],
            "network": self.network.to_dict(),
            "frozen_phi": self.frozen_phi,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassificationTask":
        states = [QuantumState(np.array([z["re"] + 1j * z["im"] for z in s])) for s in doc["class_states"]]
        return cls(states, NetworkSpec.from_dict(doc["network"]), doc["frozen_phi"])


def bell_task(frozen_phi: bool = False) -> ClassificationTask:
    states = [prepare_class_state(f"bell{k}") for k in range(1, 5)]
    return ClassificationTask(states, NetworkSpec.fully_connected(2, 2), frozen_phi)


def ghz_plus_task(m: int, n: int | None = None, frozen_phi: bool = False) -> ClassificationTask:
    n = m if n is None else n
    states = [prepare_class_state("ghz", m), prepare_class_state("plus", m)]
    return ClassificationTask(states, NetworkSpec.fully_connected(m, n), frozen_phi)


def objective(task: ClassificationTask, phi, theta) -> float:
    """Sum of outcome-distribution trace distances over unordered class pairs."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if phi.shape != (task.n_phi,) or theta.shape != (task.n_theta,):
        raise SimulationError("parameter lengths do not match the network")
    p = task.distributions(phi, theta)
    return float(sum(0.5 * np.abs(p[i] - p[j]).sum() for i, j in task._pairs))


@dataclass(eq=False)
class RestartResult:
    index: int
    best_x: np.ndarray
    best_objective: float
    evaluations: int
    trajectory: np.ndarray  # best-so-far after each evaluation


@dataclass(eq=False)
class OptimizationResult:
    best_phi: np.ndarray
    best_theta: np.ndarray
    best_objective: float
    trajectory: np.ndarray
    restarts: list[RestartResult] = field(default_factory=list)
    best_restart: int = 0

    @property
    def evaluations(self) -> int:
        return sum(r.evaluations for r in self.restarts)

    def to_dict(self) -> dict:
        return {
            "best_phi": self.best_phi.tolist(),
            "best_theta": self.best_theta.tolist(),
            "best_objective": self.best_objective,
            "best_restart": self.best_restart,
            "evaluations": self.evaluations,
            "restarts": [
                {"restart": r.index, "best_objective": r.best_objective, "evaluations": r.evaluations}
                for r in self.restarts
            ],
            "trajectory": [
                {"restart": r, "evaluation": e, "objective": v} for r, e, v in self.trajectory_points()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def trajectory_points(self) -> list[tuple[int, int, float]]:
        """``(restart, evaluation, best-so-far)`` at every improvement and at each restart's last evaluation."""
        points = []
        for r in self.restarts:
            traj = r.trajectory
            keep = np.flatnonzero(np.diff(traj, prepend=-np.inf) > 0)
            if len(traj) and (not len(keep) or keep[-1] != len(traj) - 1):
                keep = np.append(keep, len(traj) - 1)
            points += [(r.index, int(k) + 1, float(traj[k])) for k in keep]
        return points

    def trajectory_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["restart", "evaluation", "objective"])
        for r, e, v in self.trajectory_points():
            w.writerow([r, e, f"{v:.12g}"])
        return buf.getvalue()


class _BudgetExhausted(Exception):
    pass


class _CountingObjective:
    """Negated objective for a minimiser; tracks the best point and stops at the budget."""

    def __init__(self, task: ClassificationTask, budget: int):
        self.task = task
        self.budget = budget
        self.history = np.empty(budget)
        self.count = 0
        self.best = -np.inf
        self.best_x = None

    def __call__(self, x: np.ndarray) -> float:
        if self.count >= self.budget:
            raise _BudgetExhausted
        value = objective(self.task, *self.task.split(x))
        if value > self.best:
            self.best, self.best_x = value, np.array(x, dtype=float)
        self.history[self.count] = self.best
        self.count += 1
        return -value


def _run_restart(task, budget, index, seed_seq, step=1.0, min_step=1e-6, tol=1e-12) -> RestartResult:
    rng = np.random.default_rng(seed_seq)
    dim = task.n_params
    x = rng.uniform(-np.pi, np.pi, dim)
    f = _CountingObjective(task, budget)
    try:
        # no measurement beats the state trace distances, so stop once they are reached
        while step >= min_step and f.best < task.ceiling - tol:
            before = f.best
            simplex = np.vstack([x, x + step * np.eye(dim)])
            minimize(
                f, x, method="Nelder-Mead",
                options={"adaptive": True, "initial_simplex": simplex,
                         "maxfev": budget, "xatol": 1e-10, "fatol": 1e-14},
            )
            x = f.best_x
            if f.best <= before + tol:
                step /= 2
    except _BudgetExhausted:
        pass
    return RestartResult(index, f.best_x, f.best, f.count, f.history[: f.count].copy())


def _worker_count() -> int:
    raw = os.environ.get("MEMRISTORQ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise SimulationError(f"MEMRISTORQ_THREADS must be an integer, got {raw!r}") from None


def optimize(task: ClassificationTask, budget: int, restarts: int = 1, seed: int = 0) -> OptimizationResult:
    """Maximise :func:`objective` with Nelder-Mead from ``restarts`` uniform starts.

    ``budget`` is the number of objective evaluations per restart.  Inside a
    restart the simplex is rebuilt around the best point, halving its size
    whenever a run stops improving.  Restarts draw independent streams from
    ``seed``; ties go to the lowest restart index, so results do not depend
    on the thread count.
    """
    if budget < 1 or restarts < 1:
        raise SimulationError("budget and restarts must be at least 1")
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    workers = min(_worker_count(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(lambda k: _run_restart(task, budget, k, seeds[k]), range(restarts)))
    else:
        runs = [_run_restart(task, budget, k, seeds[k]) for k in range(restarts)]
    best = max(runs, key=lambda r: (r.best_objective, -r.index))
    phi, theta = task.split(best.best_x)
    trajectory = np.concatenate([r.trajectory for r in runs])
    return OptimizationResult(phi, theta, best.best_objective, trajectory, runs, best.index)
