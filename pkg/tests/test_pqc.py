import math

import numpy as np
import pytest

from lab.qkd.domain.exceptions import LearningError
from lab.qkd.domain.learning.pqc import (
    MseObjective,
    TraceEntry,
    TrainingExample,
    TrainingTrace,
    apply_pqc,
    loss_mse,
    parameter_shift_gradient,
    pqc_unitary,
    with_context,
)
from lab.qkd.domain.protocols.base import prepare
from lab.qkd.domain.quantum.gates import is_unitary
from lab.qkd.domain.quantum.state import DensityMatrix, measure_distribution
from lab.qkd.domain.value_objects import Ansatz, Basis, PqcParams


def _batch():
    return [
        TrainingExample(0, prepare(0, Basis.RECTILINEAR)),
        TrainingExample(1, prepare(1, Basis.RECTILINEAR)),
        TrainingExample(0, prepare(0, Basis.DIAGONAL)),
        TrainingExample(1, prepare(1, Basis.DIAGONAL)),
    ]


# ============================================================================
# Parameters
# ============================================================================

def test_parameter_counts():
    """Three angles per layer, plus one for the basis-aware coupling."""
    assert Ansatz.SINGLE.parameter_count(2) == 6
    assert Ansatz.BASIS_AWARE.parameter_count(1) == 4
    assert PqcParams.zeros(Ansatz.BASIS_AWARE).dimension == 4


def test_angles_are_canonicalized():
    """Angles are stored in [0, 2 pi)."""
    params = PqcParams((-math.pi / 2, 7.0, 0.0))
    assert params.thetas[0] == pytest.approx(3 * math.pi / 2)
    assert params.thetas[1] == pytest.approx(7.0 - 2 * math.pi)


@pytest.mark.parametrize("theta", [-1e-17, -1e-300, 2 * math.pi, -2 * math.pi])
def test_angles_stay_below_two_pi(theta):
    """Values that round onto 2 pi wrap to 0."""
    params = PqcParams((theta, 0.0, 0.0))
    assert 0.0 <= params.thetas[0] < 2 * math.pi
    assert params.thetas[0] == pytest.approx(0.0, abs=1e-12)


def test_wrong_angle_count_raises():
    """A single layer takes exactly three angles."""
    with pytest.raises(LearningError):
        PqcParams((0.1, 0.2))


def test_inverse_undoes_circuit():
    """U(inverse) U = I up to a global phase."""
    params = PqcParams((0.3, 1.1, -0.4, 2.0, 0.5, 0.9), layers=2)
    u = pqc_unitary(params.thetas, params.ansatz, params.layers)
    v = pqc_unitary(params.inverse().thetas, params.ansatz, params.layers)
    product = v @ u
    assert np.allclose(product / product[0, 0], np.eye(2), atol=1e-12)


def test_inverse_needs_single_ansatz():
    """The two-qubit ansatz has no same-form inverse."""
    with pytest.raises(LearningError):
        PqcParams.zeros(Ansatz.BASIS_AWARE).inverse()


# ============================================================================
# Circuit
# ============================================================================

@pytest.mark.parametrize("ansatz", list(Ansatz))
def test_unitary_for_random_angles(ansatz):
    """The ansatz is unitary for any angles."""
    rng = np.random.default_rng(0)
    thetas = rng.uniform(0, 2 * math.pi, size=ansatz.parameter_count(2))
    assert is_unitary(pqc_unitary(thetas, ansatz, 2))


def test_zero_angles_are_identity():
    """theta = 0 leaves the state alone."""
    rho = prepare(1, Basis.DIAGONAL)
    assert apply_pqc(rho, PqcParams.zeros()).allclose(rho)


def test_ry_layer_flips_bit():
    """Rz(0) Ry(pi) Rz(0) maps |0> to |1>."""
    out = apply_pqc(DensityMatrix.from_bits([0]), PqcParams((0.0, math.pi, 0.0)))
    assert measure_distribution(out)[1] == pytest.approx(1.0, abs=1e-12)


def test_context_coupling_decodes_diagonal_states():
    """With context 1, the coupling at -pi/2 maps |+>/|-> to |0>/|1>."""
    params = PqcParams((0.0, 0.0, 0.0, -math.pi / 2), Ansatz.BASIS_AWARE)
    for bit in (0, 1):
        out = apply_pqc(with_context(prepare(bit, Basis.DIAGONAL), 1), params)
        dist = measure_distribution(out)
        p_key_one = dist[2] + dist[3]
        assert p_key_one == pytest.approx(float(bit), abs=1e-12)


def test_context_zero_disables_coupling():
    """With context 0 the coupling acts as the identity."""
    params = PqcParams((0.0, 0.0, 0.0, 1.3), Ansatz.BASIS_AWARE)
    rho = with_context(prepare(1, Basis.RECTILINEAR), 0)
    assert apply_pqc(rho, params).allclose(rho)


def test_qubit_count_must_match_ansatz():
    """A single-qubit ansatz cannot act on two qubits."""
    with pytest.raises(LearningError):
        apply_pqc(DensityMatrix.from_bits([0, 0]), PqcParams.zeros())


# ============================================================================
# Loss and gradient
# ============================================================================

def test_loss_is_zero_for_perfect_decoding():
    """Rectilinear states decode perfectly at theta = 0."""
    batch = _batch()[:2]
    assert loss_mse(PqcParams.zeros(), batch) == 0.0


def test_loss_value_for_coin_flips():
    """Diagonal states at theta = 0 are wrong with probability 1/2: loss 1/4."""
    batch = _batch()[2:]
    assert loss_mse(PqcParams.zeros(), batch) == pytest.approx(0.25, abs=1e-12)


def test_loss_lies_in_unit_interval():
    """Squared probabilities average into [0, 1]."""
    rng = np.random.default_rng(1)
    objective = MseObjective(_batch(), Ansatz.SINGLE)
    for thetas in rng.uniform(0, 2 * math.pi, size=(20, 3)):
        assert 0.0 <= objective(thetas) <= 1.0


@pytest.mark.parametrize("ansatz", list(Ansatz))
def test_parameter_shift_matches_finite_differences(ansatz):
    """The shift rule agrees with central differences."""
    batch = _batch()
    if ansatz is Ansatz.BASIS_AWARE:
        batch = [TrainingExample(ex.bit, with_context(ex.state, i % 2)) for i, ex in enumerate(batch)]
    objective = MseObjective(batch, ansatz)
    rng = np.random.default_rng(2)
    thetas = rng.uniform(0, 2 * math.pi, size=objective.dimension)
    grad = parameter_shift_gradient(objective, thetas)
    h = 1e-6
    for j in range(len(thetas)):
        plus, minus = thetas.copy(), thetas.copy()
        plus[j] += h
        minus[j] -= h
        numeric = (objective(plus) - objective(minus)) / (2 * h)
        assert grad[j] == pytest.approx(numeric, abs=1e-6)


def test_empty_batch_raises():
    """The loss needs examples."""
    with pytest.raises(LearningError):
        MseObjective([], Ansatz.SINGLE)


def test_training_example_bit_validation():
    """Labels are bits."""
    with pytest.raises(LearningError):
        TrainingExample(2, DensityMatrix.from_bits([0]))


def test_trace_best_is_minimum():
    """from_entries keeps the lowest-loss angles."""
    trace = TrainingTrace.from_entries([
        TraceEntry(0, 0.3, (0.0,)),
        TraceEntry(1, 0.1, (0.5,)),
        TraceEntry(2, 0.2, (0.7,)),
    ])
    assert trace.best_loss == 0.1
    assert trace.best_thetas == (0.5,)
    assert trace.initial_loss == 0.3
