from abc import ABC, abstractmethod
from typing import Callable, Sequence

from ..entities import TrainingConfig
from ..learning.pqc import TrainingTrace
from ..value_objects import PqcParams


Objective = Callable[[Sequence[float]], float]


class PqcOptimizer(ABC):
    """
    Port for minimizing a PQC loss.

    Gradient-based implementations expect the objective to expose a
    `gradient(thetas)` method (see MseObjective).
    """

    @abstractmethod
    def minimize(self, objective: Objective, initial: PqcParams, config: TrainingConfig) -> TrainingTrace:
        """
        Minimize `objective` starting at `initial.thetas`.

        Trace entry 0 is the initial evaluation; `best_loss` never
        exceeds it.
        """
        pass
