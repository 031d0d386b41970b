from abc import ABC, abstractmethod
from typing import Sequence

from ..metrics import ConfusionMatrix, RocCurve


class MetricsEngine(ABC):
    """
    Port for the classification primitives behind the metric suite.
    """

    @abstractmethod
    def confusion(self, truth: Sequence[int], predicted: Sequence[int]) -> ConfusionMatrix:
        """
        Confusion counts with bit 1 as the positive class.
        """
        pass

    @abstractmethod
    def roc(self, truth: Sequence[int], scores: Sequence[float]) -> RocCurve:
        """
        ROC curve over every distinct score threshold.
        """
        pass
