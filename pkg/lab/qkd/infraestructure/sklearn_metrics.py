import logging
from typing import Sequence

import numpy as np
from scipy.stats import rankdata
from sklearn.metrics import auc, confusion_matrix, roc_curve

from lab.qkd.domain.exceptions import MetricError
from lab.qkd.domain.metrics import ConfusionMatrix, RocCurve
from lab.qkd.domain.ports.metrics_engine import MetricsEngine
from lab.qkd.domain.utils.decorators import logged


def _bits(values: Sequence[int]) -> np.ndarray:
    arr = np.asarray(list(values), dtype=np.int64)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise MetricError("Bit strings may only contain 0 and 1")
    return arr


def rank_auc(truth: Sequence[int], scores: Sequence[float]) -> float:
    """
    Probability that a random positive outranks a random negative,
    ties counted half (Mann-Whitney U / (n_pos * n_neg)).
    """
    y = _bits(truth)
    s = np.asarray(list(scores), dtype=np.float64)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC is undefined when the truth has a single class")
    ranks = rankdata(s, method="average")
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


class SklearnMetricsEngine(MetricsEngine):
    """
    Confusion matrices and ROC curves through sklearn.metrics, with
    the AUC cross-checked against the rank statistic.
    """

    @logged(logger_name="qkd.infrastructure.sklearn_metrics", level=logging.DEBUG)
    def confusion(self, truth: Sequence[int], predicted: Sequence[int]) -> ConfusionMatrix:
        y_true, y_pred = _bits(truth), _bits(predicted)
        if y_true.shape != y_pred.shape:
            raise MetricError(f"Length mismatch: {y_true.size} truth vs {y_pred.size} predicted bits")
        if y_true.size == 0:
            raise MetricError("Cannot build a confusion matrix from empty strings")
        tn, fp, fn, tp = confusion_matrix(y_true, y_pred, labels=[0, 1]).ravel()
        return ConfusionMatrix(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))

    @logged(logger_name="qkd.infrastructure.sklearn_metrics", level=logging.DEBUG)
    def roc(self, truth: Sequence[int], scores: Sequence[float]) -> RocCurve:
        y_true = _bits(truth)
        y_score = np.asarray(list(scores), dtype=np.float64)
        if y_true.shape != y_score.shape:
            raise MetricError(f"Length mismatch: {y_true.size} labels vs {y_score.size} scores")
        if np.any((y_score < 0) | (y_score > 1)) or not np.all(np.isfinite(y_score)):
            raise MetricError("Scores must lie in [0, 1]")
        if y_true.size == 0 or y_true.min() == y_true.max():
            raise MetricError("ROC/AUC is undefined when the truth has a single class")

        fpr, tpr, thresholds = roc_curve(y_true, y_score, drop_intermediate=False)
        return RocCurve(
            points=tuple((float(f), float(t)) for f, t in zip(fpr, tpr)),
            auc=float(auc(fpr, tpr)),
            rank_auc=rank_auc(y_true, y_score),
            thresholds=tuple(float(th) for th in thresholds),
        )


def confusion(truth: Sequence[int], predicted: Sequence[int]) -> ConfusionMatrix:
    return SklearnMetricsEngine().confusion(truth, predicted)


def roc(truth: Sequence[int], scores: Sequence[float]) -> RocCurve:
    return SklearnMetricsEngine().roc(truth, scores)
