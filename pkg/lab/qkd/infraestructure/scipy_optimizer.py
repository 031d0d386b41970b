import logging
import math
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize

from lab.qkd.domain.entities import TrainingConfig
from lab.qkd.domain.exceptions import OptimizationError
from lab.qkd.domain.learning.pqc import TraceEntry, TrainingTrace
from lab.qkd.domain.ports.optimizer import Objective, PqcOptimizer
from lab.qkd.domain.utils.decorators import logged
from lab.qkd.domain.value_objects import PqcParams


class _RecordingObjective:
    """
    Wraps an objective so the first `budget` evaluations land in the
    trace. Later evaluations still return a value but are not recorded;
    a non-finite loss is flagged and replaced by a large penalty.
    """

    PENALTY = 1e10

    def __init__(self, objective: Objective, entries: List[TraceEntry], budget: int) -> None:
        self._objective = objective
        self._entries = entries
        self._remaining = budget
        self.non_finite: Optional[float] = None

    def __call__(self, x: np.ndarray) -> float:
        value = float(self._objective(x))
        if not math.isfinite(value):
            if self.non_finite is None:
                self.non_finite = value
            return self.PENALTY
        if self._remaining > 0 and self.non_finite is None:
            self._remaining -= 1
            self._entries.append(TraceEntry(len(self._entries), value, tuple(float(t) for t in x)))
        return value

    def check(self) -> None:
        if self.non_finite is not None:
            raise OptimizationError(f"Objective returned a non-finite value: {self.non_finite!r}")


class CobylaOptimizer(PqcOptimizer):
    """
    Derivative-free training with scipy's COBYLA (linear models on a
    simplex of d+1 points inside a shrinking trust region).

    `config.max_iterations` evaluations are recorded per round after
    the initial one; COBYLA may need a few more to build its first
    simplex, and those are evaluated but dropped from the trace. Later
    rounds restart from the best point and the loop stops early when a
    round brings no improvement.
    """

    def __init__(self, rhobeg: float = 1.0, tol: float = 1e-8) -> None:
        self._rhobeg = rhobeg
        self._tol = tol

    @logged(logger_name="qkd.infrastructure.cobyla", level=logging.DEBUG)
    def minimize(self, objective: Objective, initial: PqcParams, config: TrainingConfig) -> TrainingTrace:
        entries: List[TraceEntry] = []
        x0 = np.asarray(initial.thetas, dtype=np.float64)
        first = _RecordingObjective(objective, entries, budget=1)
        first(x0)
        first.check()

        for _ in range(config.rounds):
            best_before = min(e.loss for e in entries)
            start = np.asarray(min(entries, key=lambda e: e.loss).thetas)
            recorder = _RecordingObjective(objective, entries, budget=config.max_iterations)
            minimize(
                recorder,
                start,
                method="COBYLA",
                tol=self._tol,
                options={"rhobeg": self._rhobeg, "maxiter": max(config.max_iterations, len(start) + 2)},
            )
            recorder.check()
            if min(e.loss for e in entries) >= best_before:
                break

        return TrainingTrace.from_entries(entries)


def optimize_derivative_free(objective: Objective, initial: PqcParams, config: TrainingConfig) -> TrainingTrace:
    return CobylaOptimizer().minimize(objective, initial, config)

