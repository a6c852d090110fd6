import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from memristorq.classify import prepare_class_state
from memristorq.memristive import build_m_theta
from memristorq.network import (
    NetworkSpec,
    OutcomeDistribution,
    distribution_distance,
    forward,
    z_measurement_distribution,
)
from memristorq.sim import (
    QuantumState,
    SimulationError,
    apply_gate,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    ry,
)

seeds = st.integers(0, 2**32 - 1)


def brute_forward(spec: NetworkSpec, state: QuantumState) -> np.ndarray:
    """Gate-by-gate density-matrix oracle built on sim-core."""
    hidden = QuantumState.from_label("+" * spec.n)
    rho = state.to_mixed().tensor(hidden.to_mixed())
    for i, a, b in spec.connections:
        rho = apply_gate(rho, ry(spec.phi[i - 1]), [a - 1])
        rho = apply_gate(rho, build_m_theta(spec.theta[i - 1]), [a - 1, spec.m + b - 1])
    k = spec.n_connections
    for j in range(spec.n):
        rho = apply_gate(rho, ry(spec.phi[k + j]), [spec.m + j])
    reduced = partial_trace(rho, list(range(spec.m, spec.m + spec.n)))
    return np.real(np.diag(reduced.data))


def random_spec(m, n, rng, connections=None):
    if connections is None:
        return NetworkSpec.fully_connected(m, n, rng.uniform(-np.pi, np.pi, (m + 1) * n), rng.uniform(-np.pi, np.pi, m * n))
    k = len(connections)
    return NetworkSpec(m, n, connections, rng.uniform(-np.pi, np.pi, k + n), rng.uniform(-np.pi, np.pi, k))


def test_default_ordering():
    spec = NetworkSpec.fully_connected(3, 4)
    for i, a, b in spec.connections:
        assert i == 4 * (a - 1) + b
    assert spec.phi.size == 16 and spec.theta.size == 12


def test_single_connection_write():
    spec = NetworkSpec.fully_connected(1, 1)
    dist = forward(spec, QuantumState.from_label("0"))
    assert dist["0"] == pytest.approx(1.0, abs=1e-12)


def test_two_input_network_distribution():
    spec = NetworkSpec.fully_connected(2, 1, [np.pi / 2, np.pi / 2, -np.pi / 4], [0, 0])
    p = forward(spec, prepare_class_state("ghz", 2))
    q = forward(spec, prepare_class_state("plus", 2))
    assert np.allclose(p.probs, brute_forward(spec, prepare_class_state("ghz", 2)), atol=1e-12)
    assert distribution_distance(p, q) == pytest.approx(1 / np.sqrt(2), abs=1e-10)


def test_mixed_input_normalised():
    rng = np.random.default_rng(0)
    spec = random_spec(2, 2, rng)
    spec.theta[:] = np.pi / 2
    dist = forward(spec, QuantumState(np.eye(4) / 4))
    assert dist.probs.sum() == pytest.approx(1, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 2))
def test_forward_matches_brute_force(seed, m, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(m, n, rng)
    for state in (random_pure_state(m, rng), random_density_matrix(m, rng)):
        dist = forward(spec, state)
        assert np.allclose(dist.probs, brute_forward(spec, state), atol=1e-12)
        assert dist.probs.min() >= 0
        assert dist.probs.sum() == pytest.approx(1, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_partial_network_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    conns = [(1, 2, 1), (2, 1, 2), (3, 2, 2)]
    spec = random_spec(2, 2, rng, conns)
    state = random_pure_state(2, rng)
    assert np.allclose(forward(spec, state).probs, brute_forward(spec, state), atol=1e-12)


def test_time_order_matters():
    rng = np.random.default_rng(1)
    spec = random_spec(2, 2, rng)
    state = random_pure_state(2, rng)
    swapped = [(2, 1, 1), (1, 1, 2), (3, 2, 1), (4, 2, 2)]
    permuted = NetworkSpec(2, 2, swapped, spec.phi, spec.theta)
    gap = distribution_distance(forward(spec, state), forward(permuted, state))
    assert gap > 1e-6


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (2, 2)])
def test_zero_parameters_deterministic(m, n):
    spec = NetworkSpec.fully_connected(m, n)
    state = QuantumState.from_label("0" * m)
    probs = forward(spec, state).probs
    assert np.allclose(probs, brute_forward(spec, state), atol=1e-12)
    assert probs.max() == pytest.approx(1.0, abs=1e-12)


def test_zero_parameters_single_current_two_hidden():
    # the first swap leaves the current in |+>, which the second connection cannot imprint
    spec = NetworkSpec.fully_connected(1, 2)
    state = QuantumState.from_label("0")
    probs = forward(spec, state).probs
    assert np.allclose(probs, brute_forward(spec, state), atol=1e-12)
    assert np.allclose(probs, [0.5, 0.5, 0, 0], atol=1e-12)


def test_spec_validation():
    with pytest.raises(SimulationError):
        NetworkSpec(2, 2, [(1, 3, 1)], np.zeros(3), np.zeros(1))
    with pytest.raises(SimulationError):
        NetworkSpec(2, 2, [(2, 1, 1)], np.zeros(3), np.zeros(1))
    with pytest.raises(SimulationError):
        NetworkSpec.fully_connected(2, 2, np.zeros(5), np.zeros(4))
    with pytest.raises(SimulationError):
        forward(NetworkSpec.fully_connected(2, 2), QuantumState.from_label("000"))


def test_spec_json_round_trip():
    spec = random_spec(2, 3, np.random.default_rng(2))
    doc = json.loads(spec.to_json())
    assert set(doc) == {"m", "n", "connections", "phi", "theta"}
    again = NetworkSpec.from_json(spec.to_json())
    assert again.connections == spec.connections
    assert np.array_equal(again.phi, spec.phi) and np.array_equal(again.theta, spec.theta)


def test_distance_properties():
    rng = np.random.default_rng(3)
    ps = [OutcomeDistribution(rng.dirichlet(np.ones(8))) for _ in range(3)]
    p, q, r = ps
    assert distribution_distance(p, p) == 0
    assert distribution_distance(p, q) == pytest.approx(distribution_distance(q, p))
    assert distribution_distance(p, r) <= distribution_distance(p, q) + distribution_distance(q, r) + 1e-15
    a = OutcomeDistribution(np.array([1.0, 0, 0, 0]))
    b = OutcomeDistribution(np.array([0, 0, 0.5, 0.5]))
    assert distribution_distance(a, b) == pytest.approx(1)
    with pytest.raises(SimulationError):
        distribution_distance(a, OutcomeDistribution(np.array([0.5, 0.5])))


def test_direct_z_distance_m5():
    p = z_measurement_distribution(prepare_class_state("ghz", 5))
    q = z_measurement_distribution(prepare_class_state("plus", 5))
    assert distribution_distance(p, q) == pytest.approx(0.9375, abs=1e-12)


def test_outcome_distribution_api():
    d = OutcomeDistribution(np.array([0.25, 0.25, 0.5, 0.0]))
    assert d.n == 2
    assert d["10"] == 0.5
    assert list(d.as_dict()) == ["00", "01", "10", "11"]
    with pytest.raises(KeyError):
        d["2"]
    with pytest.raises(SimulationError):
        OutcomeDistribution(np.array([0.6, 0.6]))
    sampled = d.sample(1000, np.random.default_rng(0))
    assert sampled.probs[3] == 0 and sampled.probs.sum() == pytest.approx(1)


def test_bit_convention():
    # a hidden qubit rotated to |1> before measurement reads 1 (Z = -1)
    spec = NetworkSpec(1, 2, [], np.array([np.pi / 2, -np.pi / 2]), np.zeros(0))
    # R_y(pi/2)|+> = |1>, R_y(-pi/2)|+> = |0>
    dist = forward(spec, QuantumState.from_label("0"))
    assert dist["10"] == pytest.approx(1, abs=1e-12)
