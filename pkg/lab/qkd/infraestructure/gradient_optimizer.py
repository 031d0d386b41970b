import logging
from typing import List

import numpy as np

from lab.qkd.domain.entities import TrainingConfig
from lab.qkd.domain.exceptions import OptimizationError
from lab.qkd.domain.learning.pqc import TraceEntry, TrainingTrace
from lab.qkd.domain.ports.optimizer import Objective, PqcOptimizer
from lab.qkd.domain.utils.decorators import logged
from lab.qkd.domain.value_objects import PqcParams


class ParameterShiftOptimizer(PqcOptimizer):
    """
    Plain gradient descent, theta <- theta - eta * g, with g from the
    objective's parameter-shift gradient. One trace entry per step.
    """

    @logged(logger_name="qkd.infrastructure.gradient", level=logging.DEBUG)
    def minimize(self, objective: Objective, initial: PqcParams, config: TrainingConfig) -> TrainingTrace:
        gradient = getattr(objective, "gradient", None)
        if gradient is None:
            raise OptimizationError("Gradient descent needs an objective with a gradient(thetas) method")

        thetas = np.asarray(initial.thetas, dtype=np.float64)
        entries: List[TraceEntry] = [TraceEntry(0, self._loss(objective, thetas), tuple(thetas))]
        for step in range(1, config.max_iterations + 1):
            g = np.asarray(gradient(thetas), dtype=np.float64)
            if not np.all(np.isfinite(g)):
                raise OptimizationError(f"Non-finite gradient at step {step}: {g}")
            thetas = thetas - config.learning_rate * g
            entries.append(TraceEntry(step, self._loss(objective, thetas), tuple(float(t) for t in thetas)))
        return TrainingTrace.from_entries(entries)

    @staticmethod
    def _loss(objective: Objective, thetas: np.ndarray) -> float:
        value = float(objective(thetas))
        if not np.isfinite(value):
            raise OptimizationError(f"Objective returned a non-finite value: {value!r}")
        return value


def optimize_gradient(objective: Objective, initial: PqcParams, config: TrainingConfig) -> TrainingTrace:
    return ParameterShiftOptimizer().minimize(objective, initial, config)
