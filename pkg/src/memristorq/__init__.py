"""Simulation toolkit for memristive quantum gates and networks built from them."""

from .sim import QuantumState, SimulationError
from .memristive import build_m_theta, build_m_tilde, build_encoding_channel, MemristiveGateSpec
from .channels import BlochVector, PauliTransferMap, ptm_plasticity, ptm_encoding, steady_state, iterate
from .experiments import DriveSchedule, ExperimentTrace, run_trace, hysteresis_loop
from .network import NetworkSpec, OutcomeDistribution, forward, distribution_distance
from .compiler import (
    ConnectionProgram,
    compile_write,
    compile_read,
    compile_single_qubit,
    compile_cnot,
    resource_count,
    verify_program,
)
from .classify import (
    ClassificationTask,
    OptimizationResult,
    prepare_class_state,
    objective,
    optimize,
    quantum_upper_bound,
    classical_baseline,
)

__all__ = [
    "QuantumState",
    "SimulationError",
    "build_m_theta",
    "build_m_tilde",
    "build_encoding_channel",
    "MemristiveGateSpec",
    "BlochVector",
    "PauliTransferMap",
    "ptm_plasticity",
    "ptm_encoding",
    "steady_state",
    "iterate",
    "DriveSchedule",
    "ExperimentTrace",
    "run_trace",
    "hysteresis_loop",
    "NetworkSpec",
    "OutcomeDistribution",
    "forward",
    "distribution_distance",
    "ConnectionProgram",
    "compile_write",
    "compile_read",
    "compile_single_qubit",
    "compile_cnot",
    "resource_count",
    "verify_program",
    "ClassificationTask",
    "OptimizationResult",
    "prepare_class_state",
    "objective",
    "optimize",
    "quantum_upper_bound",
    "classical_baseline",
]
