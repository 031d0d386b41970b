"""
Binary-classification metrics over protocol transcripts.

The positive class is bit 1. Alice's bits are the truth and Bob's
measured bits the prediction, over all transmitted positions; the
sifted QBER compares only the conclusive positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np

from .exceptions import MetricError
from .value_objects import ProtocolTranscript

if TYPE_CHECKING:
    from .ports.metrics_engine import MetricsEngine


AUC_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        counts = {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}
        if any(v < 0 for v in counts.values()):
            raise MetricError(f"Confusion counts cannot be negative, got {counts}")
        for name, value in counts.items():
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class ScalarMetrics:
    """
    Accuracy, precision, recall and F1; an undefined ratio is reported
    as 0 with its flag set.
    """

    accuracy: float
    precision: float
    recall: float
    f1: float
    precision_undefined: bool = False
    recall_undefined: bool = False
    f1_undefined: bool = False


@dataclass(frozen=True)
class RocCurve:
    """
    ROC points from (0, 0) to (1, 1) and the area under them.
    `rank_auc` is the Mann-Whitney estimate of the same area.
    """

    points: Tuple[Tuple[float, float], ...]
    auc: float
    rank_auc: float
    thresholds: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise MetricError("A ROC curve needs at least two points")
        fpr = np.array([p[0] for p in self.points])
        tpr = np.array([p[1] for p in self.points])
        if (fpr[0], tpr[0]) != (0.0, 0.0) or (fpr[-1], tpr[-1]) != (1.0, 1.0):
            raise MetricError("ROC curve must run from (0, 0) to (1, 1)")
        if np.any(np.diff(fpr) < 0) or np.any(np.diff(tpr) < 0):
            raise MetricError("ROC points must be monotone non-decreasing")
        if abs(float(np.trapezoid(tpr, fpr)) - self.auc) > AUC_TOLERANCE:
            raise MetricError("AUC does not match the trapezoidal area of the points")
        if abs(self.auc - self.rank_auc) > AUC_TOLERANCE:
            raise MetricError(f"Trapezoid AUC {self.auc} disagrees with rank AUC {self.rank_auc}")


@dataclass(frozen=True)
class MeanStd:
    mean: float
    std: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "MeanStd":
        arr = np.asarray(values, dtype=np.float64)
        return cls(mean=float(arr.mean()), std=float(arr.std(ddof=0)))

    def __str__(self) -> str:
        return f"{self.mean:.3f} ± {self.std:.3f}"


@dataclass(frozen=True)
class SampleMetrics:
    """Metrics of one transcript."""

    confusion: ConfusionMatrix
    scalars: ScalarMetrics
    qber_sifted: float
    qber_all: float
    sift_fraction: float
    sifted_empty: bool = False


@dataclass(frozen=True)
class MetricsSummary:
    """
    Mean ± std over samples. `qber_sifted` compares the conclusive
    positions only; `qber_all` compares every transmitted position.
    """

    accuracy: MeanStd
    precision: MeanStd
    recall: MeanStd
    f1: MeanStd
    qber_sifted: MeanStd
    qber_all: MeanStd
    sift_fraction: MeanStd
    samples: int

    def __post_init__(self) -> None:
        for name in ("accuracy", "precision", "recall", "f1", "qber_sifted", "qber_all"):
            mean = getattr(self, name).mean
            if not 0.0 <= mean <= 1.0:
                raise MetricError(f"{name} mean must lie in [0, 1], got {mean}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def scalar_metrics(cm: ConfusionMatrix) -> ScalarMetrics:
    if cm.total == 0:
        raise MetricError("Cannot compute metrics of an empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total

    precision_undefined = (cm.tp + cm.fp) == 0
    precision = 0.0 if precision_undefined else cm.tp / (cm.tp + cm.fp)
    recall_undefined = (cm.tp + cm.fn) == 0
    recall = 0.0 if recall_undefined else cm.tp / (cm.tp + cm.fn)

    f1_undefined = (precision + recall) == 0
    f1 = 0.0 if f1_undefined else 2 * precision * recall / (precision + recall)
    return ScalarMetrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        precision_undefined=precision_undefined,
        recall_undefined=recall_undefined,
        f1_undefined=f1_undefined,
    )


def qber(truth: Sequence[int], predicted: Sequence[int], mask: Optional[Sequence[bool]] = None) -> float:
    """
    Mismatch fraction over the masked positions, or all positions.
    """
    t = np.asarray(list(truth), dtype=np.int64)
    p = np.asarray(list(predicted), dtype=np.int64)
    if t.shape != p.shape:
        raise MetricError(f"Length mismatch: {t.size} truth vs {p.size} predicted bits")
    if mask is not None:
        m = np.asarray(list(mask), dtype=bool)
        if m.shape != t.shape:
            raise MetricError(f"Mask has {m.size} entries for {t.size} bits")
        t, p = t[m], p[m]
    if t.size == 0:
        raise MetricError("QBER needs at least one compared position")
    return float(np.count_nonzero(t != p)) / t.size


def sample_metrics(transcript: ProtocolTranscript, engine: "MetricsEngine") -> SampleMetrics:
    cm = engine.confusion(transcript.alice_bits, transcript.bob_bits)
    sifted_empty = not transcript.sifted_key
    qber_sifted = 0.0 if sifted_empty else qber(transcript.alice_sifted, transcript.sifted_key)
    return SampleMetrics(
        confusion=cm,
        scalars=scalar_metrics(cm),
        qber_sifted=qber_sifted,
        qber_all=qber(transcript.alice_bits, transcript.bob_bits),
        sift_fraction=transcript.sift_fraction,
        sifted_empty=sifted_empty,
    )


def summarize(samples: Sequence[SampleMetrics]) -> MetricsSummary:
    if not samples:
        raise MetricError("Cannot summarize zero samples")
    return MetricsSummary(
        accuracy=MeanStd.of([s.scalars.accuracy for s in samples]),
        precision=MeanStd.of([s.scalars.precision for s in samples]),
        recall=MeanStd.of([s.scalars.recall for s in samples]),
        f1=MeanStd.of([s.scalars.f1 for s in samples]),
        qber_sifted=MeanStd.of([s.qber_sifted for s in samples]),
        qber_all=MeanStd.of([s.qber_all for s in samples]),
        sift_fraction=MeanStd.of([s.sift_fraction for s in samples]),
        samples=len(samples),
    )


def summarize_transcripts(transcripts: Sequence[ProtocolTranscript], engine: "MetricsEngine") -> MetricsSummary:
    return summarize([sample_metrics(t, engine) for t in transcripts])
