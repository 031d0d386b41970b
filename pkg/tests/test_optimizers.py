import math

import numpy as np
import pytest

from lab.qkd.domain.entities import TrainingConfig
from lab.qkd.domain.exceptions import OptimizationError
from lab.qkd.domain.learning.pqc import MseObjective, TrainingExample
from lab.qkd.domain.protocols.base import prepare
from lab.qkd.domain.value_objects import Ansatz, Basis, OptimizerKind, PqcParams
from lab.qkd.infraestructure.gradient_optimizer import ParameterShiftOptimizer, optimize_gradient
from lab.qkd.infraestructure.scipy_optimizer import CobylaOptimizer, optimize_derivative_free


START = PqcParams.zeros()


def _quadratic(thetas):
    return float(np.sum((np.asarray(thetas) - 1.0) ** 2))


def _flipped_batch():
    """Rectilinear states labelled with the opposite bit: optimum is Ry(pi)."""
    return [
        TrainingExample(1, prepare(0, Basis.RECTILINEAR)),
        TrainingExample(0, prepare(1, Basis.RECTILINEAR)),
    ]


# ============================================================================
# COBYLA
# ============================================================================

def test_cobyla_minimizes_quadratic():
    """The best point approaches (1, 1, 1)."""
    trace = optimize_derivative_free(_quadratic, START, TrainingConfig(max_iterations=200))
    assert trace.best_loss < 1e-6
    assert np.allclose(trace.best_thetas, 1.0, atol=1e-3)


def test_cobyla_first_entry_is_initial_point():
    """Entry 0 is the starting evaluation."""
    trace = CobylaOptimizer().minimize(_quadratic, START, TrainingConfig(max_iterations=10, rounds=1))
    assert trace.entries[0].iteration == 0
    assert trace.entries[0].thetas == (0.0, 0.0, 0.0)
    assert trace.initial_loss == pytest.approx(3.0)


def test_cobyla_respects_evaluation_budget():
    """One evaluation per round after the initial one."""
    trace = CobylaOptimizer().minimize(_quadratic, START, TrainingConfig(max_iterations=1, rounds=1))
    assert len(trace) == 2


def test_cobyla_never_increases_best_loss():
    """best_loss is at most the initial loss."""
    trace = optimize_derivative_free(_quadratic, START, TrainingConfig(max_iterations=20))
    assert trace.best_loss <= trace.initial_loss


def test_cobyla_trains_pqc():
    """COBYLA learns to flip the decoded bit."""
    objective = MseObjective(_flipped_batch(), Ansatz.SINGLE)
    trace = optimize_derivative_free(objective, START, TrainingConfig())
    assert trace.best_loss < 1e-4


def test_cobyla_non_finite_objective():
    """NaN losses abort training."""
    with pytest.raises(OptimizationError):
        optimize_derivative_free(lambda t: float("nan"), START, TrainingConfig(max_iterations=5))


def test_cobyla_budget_stops_quietly(capfd):
    """A spent budget truncates the trace without scipy callback noise."""
    trace = CobylaOptimizer().minimize(_quadratic, START, TrainingConfig(max_iterations=4, rounds=3))
    assert len(trace) <= 1 + 3 * 4
    assert [e.iteration for e in trace.entries] == list(range(len(trace)))
    assert "capi_return is NULL" not in capfd.readouterr().err


def test_cobyla_non_finite_midway():
    """A NaN after the initial point still aborts training."""
    def objective(thetas):
        return _quadratic(thetas) if np.allclose(thetas, 0.0) else float("nan")

    with pytest.raises(OptimizationError):
        CobylaOptimizer().minimize(objective, START, TrainingConfig(max_iterations=5, rounds=1))


# ============================================================================
# Gradient descent
# ============================================================================

def test_gradient_descent_trains_pqc():
    """Parameter-shift descent lowers the loss of the flipped batch."""
    objective = MseObjective(_flipped_batch(), Ansatz.SINGLE)
    start = PqcParams((0.0, 0.3, 0.0))
    config = TrainingConfig(optimizer=OptimizerKind.GRADIENT_DESCENT, learning_rate=1.0, max_iterations=200)
    trace = optimize_gradient(objective, start, config)
    assert trace.best_loss < 0.01
    assert trace.best_loss < trace.initial_loss


def test_gradient_descent_one_entry_per_step():
    """Initial entry plus one per iteration."""
    objective = MseObjective(_flipped_batch(), Ansatz.SINGLE)
    trace = ParameterShiftOptimizer().minimize(objective, START, TrainingConfig(max_iterations=7))
    assert [e.iteration for e in trace.entries] == list(range(8))


def test_gradient_descent_needs_gradient():
    """A bare callable has no gradient."""
    with pytest.raises(OptimizationError):
        optimize_gradient(_quadratic, START, TrainingConfig())


def test_zero_gradient_stays_put():
    """At a stationary point the angles do not move."""
    objective = MseObjective(_flipped_batch(), Ansatz.SINGLE)
    trace = optimize_gradient(objective, PqcParams((0.0, math.pi, 0.0)), TrainingConfig(max_iterations=3))
    assert trace.best_loss == pytest.approx(0.0, abs=1e-12)
