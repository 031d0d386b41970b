import math

import numpy as np
import pytest

from lab.qkd.domain.exceptions import StateError
from lab.qkd.domain.quantum.gates import CNOT, H, X, controlled_ry, make_gate
from lab.qkd.domain.quantum.state import (
    DensityMatrix,
    apply_gate,
    majority_bit,
    marginal,
    measure_distribution,
    readout,
    sample_shots,
)
from lab.qkd.domain.value_objects import MeasurementDistribution, ShotRecord


# ============================================================================
# Validation
# ============================================================================

def test_rejects_non_unit_trace():
    """Trace 2 is not a state."""
    with pytest.raises(StateError, match="trace"):
        DensityMatrix(np.eye(2))


def test_rejects_non_hermitian():
    """An off-diagonal imbalance is rejected."""
    with pytest.raises(StateError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_rejects_negative_eigenvalue():
    """diag(1.5, -0.5) has unit trace but is not positive."""
    with pytest.raises(StateError, match="negative"):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_rejects_unsupported_dimension():
    """Only one or two qubits are simulated."""
    with pytest.raises(StateError):
        DensityMatrix(np.eye(8) / 8)


def test_matrix_is_read_only():
    """States are immutable."""
    rho = DensityMatrix.from_bits([0])
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0


def test_zero_statevector_raises():
    """The zero vector has no normalization."""
    with pytest.raises(StateError):
        DensityMatrix.from_statevector([0, 0])


# ============================================================================
# Evolution and measurement
# ============================================================================

def test_hadamard_gives_uniform_distribution():
    """H|0> measures 0 and 1 with probability 1/2."""
    dist = measure_distribution(apply_gate(DensityMatrix.from_bits([0]), H))
    assert dist[0] == pytest.approx(0.5, abs=1e-12)
    assert dist[1] == pytest.approx(0.5, abs=1e-12)


def test_phase_decode_probability_matches_cosine():
    """|0> -H- P(t1) -P(-t2)- H gives P0 = (1 + cos(t1 - t2)) / 2."""
    rng = np.random.default_rng(11)
    for t1, t2 in rng.uniform(0, 2 * math.pi, size=(100, 2)):
        rho = apply_gate(DensityMatrix.from_bits([0]), H)
        rho = apply_gate(rho, make_gate("P", t1))
        rho = apply_gate(rho, make_gate("P", -t2))
        rho = apply_gate(rho, H)
        assert measure_distribution(rho)[0] == pytest.approx((1 + math.cos(t1 - t2)) / 2, abs=1e-12)


def test_gate_on_second_qubit():
    """X on qubit 1 turns |00> into |01>."""
    rho = apply_gate(DensityMatrix.from_bits([0, 0]), X, targets=(1,))
    assert rho.allclose(DensityMatrix.from_bits([0, 1]))


def test_reversed_targets_swap_control():
    """CNOT with targets (1, 0) is controlled by qubit 1."""
    rho = apply_gate(DensityMatrix.from_bits([0, 1]), CNOT, targets=(1, 0))
    assert rho.allclose(DensityMatrix.from_bits([1, 1]))


def _random_state(rng: np.random.Generator, num_qubits: int) -> DensityMatrix:
    d = 2 ** num_qubits
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


@pytest.mark.parametrize("name", ["I", "X", "Y", "Z", "H", "P", "RX", "RY", "RZ", "CNOT", "CRY"])
def test_gates_keep_random_states_valid(name):
    """U rho U^dagger keeps trace 1, Hermiticity and positivity for every gate."""
    rng = np.random.default_rng(21)
    for _ in range(25):
        angle = float(rng.uniform(-2 * math.pi, 2 * math.pi))
        if name == "CRY":
            gate = controlled_ry(angle)
        elif name in ("P", "RX", "RY", "RZ"):
            gate = make_gate(name, angle)
        else:
            gate = make_gate(name)
        rho = _random_state(rng, 2 if gate.shape[0] == 4 else 1)
        out = apply_gate(rho, gate, targets=(0, 1) if gate.shape[0] == 4 else (0,)).matrix
        assert np.allclose(out, gate @ rho.matrix @ gate.conj().T, atol=1e-12)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(out, out.conj().T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(out)) > -1e-12


def test_marginal_of_product_state():
    """The key-qubit marginal of |1>|0> is |1>."""
    dist = measure_distribution(DensityMatrix.from_bits([1, 0]))
    assert marginal(dist, 0).probabilities == (0.0, 1.0)
    assert marginal(dist, 1).probabilities == (1.0, 0.0)


def test_tensor_appends_higher_qubit():
    """|1> (x) |0> is the basis state |10>."""
    product = DensityMatrix.from_bits([1]).tensor(DensityMatrix.from_bits([0]))
    assert product.allclose(DensityMatrix.from_bits([1, 0]))


def test_distribution_must_be_normalized():
    """Probabilities summing to 0.9 are rejected."""
    with pytest.raises(StateError):
        MeasurementDistribution((0.4, 0.5))


# ============================================================================
# Shots
# ============================================================================

def test_shots_are_reproducible():
    """The same seed gives the same counts."""
    dist = MeasurementDistribution((0.3, 0.7))
    assert sample_shots(dist, 500, seed=3).counts == sample_shots(dist, 500, seed=3).counts


def test_shot_frequencies_approach_probabilities():
    """10^4 shots land within 0.02 of the exact probability."""
    record = sample_shots(MeasurementDistribution((0.3, 0.7)), 10_000, seed=5)
    assert record.frequency(1) == pytest.approx(0.7, abs=0.02)


def test_deterministic_state_never_samples_other_outcome():
    """A basis state only ever yields its own outcome."""
    record = sample_shots(MeasurementDistribution((0.0, 1.0)), 64, seed=1)
    assert record.counts == {1: 64}


def test_zero_shots_raise():
    """At least one shot is required."""
    with pytest.raises(StateError):
        sample_shots(MeasurementDistribution((0.5, 0.5)), 0, seed=0)


@pytest.mark.parametrize("seed, expected", [(4, 0), (7, 1)])
def test_majority_tie_uses_seed_parity(seed, expected):
    """A 2-2 split is decided by the seed parity."""
    assert majority_bit(ShotRecord(shots=4, counts={0: 2, 1: 2}, seed=seed)) == expected


def test_readout_returns_exact_score():
    """The score is the exact probability of outcome 1."""
    score, bit = readout(DensityMatrix.from_bits([1]), shots=16, seed=0)
    assert score == 1.0
    assert bit == 1
