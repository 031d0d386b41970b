import numpy as np
import pytest

from lab.qkd.domain.exceptions import MetricError
from lab.qkd.domain.metrics import (
    ConfusionMatrix,
    MeanStd,
    RocCurve,
    qber,
    sample_metrics,
    scalar_metrics,
    summarize,
    summarize_transcripts,
)
from lab.qkd.domain.protocols import b92_run, bb84_run
from lab.qkd.infraestructure.sklearn_metrics import SklearnMetricsEngine, rank_auc


@pytest.fixture
def engine():
    return SklearnMetricsEngine()


# ============================================================================
# Confusion counts and scalar metrics
# ============================================================================

def test_confusion_matches_recount(engine):
    """sklearn counts agree with a direct recount on random strings."""
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 60))
        truth = rng.integers(0, 2, n).tolist()
        pred = rng.integers(0, 2, n).tolist()
        cm = engine.confusion(truth, pred)
        pairs = list(zip(truth, pred))
        assert cm.tp == pairs.count((1, 1))
        assert cm.fp == pairs.count((0, 1))
        assert cm.tn == pairs.count((0, 0))
        assert cm.fn == pairs.count((1, 0))
        assert cm.total == n


def test_confusion_single_class_has_zero_cells(engine):
    """An all-zero truth still yields a full 2x2 matrix."""
    cm = engine.confusion([0, 0, 0], [0, 1, 0])
    assert cm == ConfusionMatrix(tp=0, fp=1, tn=2, fn=0)


def test_confusion_rejects_bad_input(engine):
    """Length mismatch, empty strings and non-bits are refused."""
    with pytest.raises(MetricError):
        engine.confusion([0, 1], [0])
    with pytest.raises(MetricError):
        engine.confusion([], [])
    with pytest.raises(MetricError):
        engine.confusion([0, 2], [0, 1])


def test_scalar_metrics_values():
    """Accuracy, precision, recall and F1 from known counts."""
    m = scalar_metrics(ConfusionMatrix(tp=3, fp=1, tn=4, fn=2))
    assert m.accuracy == pytest.approx(0.7)
    assert m.precision == pytest.approx(0.75)
    assert m.recall == pytest.approx(0.6)
    assert m.f1 == pytest.approx(2 * 0.75 * 0.6 / 1.35)
    assert not (m.precision_undefined or m.recall_undefined or m.f1_undefined)


def test_scalar_metrics_undefined_ratios():
    """No predicted positives and no actual positives report 0 with flags."""
    m = scalar_metrics(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0))
    assert m.accuracy == 1.0
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
    assert m.precision_undefined and m.recall_undefined and m.f1_undefined


def test_scalar_metrics_empty_matrix():
    with pytest.raises(MetricError):
        scalar_metrics(ConfusionMatrix(0, 0, 0, 0))


def test_confusion_rejects_negative_counts():
    with pytest.raises(MetricError):
        ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)


def test_confusion_addition():
    total = ConfusionMatrix(1, 2, 3, 4) + ConfusionMatrix(4, 3, 2, 1)
    assert total == ConfusionMatrix(5, 5, 5, 5)


# ============================================================================
# QBER
# ============================================================================

def test_qber_over_all_and_masked_positions():
    """Mismatch fraction with and without a mask."""
    assert qber([0, 1, 1, 0], [0, 0, 1, 1]) == pytest.approx(0.5)
    assert qber([0, 1, 1, 0], [0, 0, 1, 1], [True, False, True, False]) == 0.0


def test_qber_errors():
    with pytest.raises(MetricError):
        qber([0, 1], [0])
    with pytest.raises(MetricError):
        qber([0, 1], [0, 1], [False, False])
    with pytest.raises(MetricError):
        qber([0, 1], [0, 1], [True])


def test_accuracy_is_complement_of_qber_all(engine):
    """Over all positions accuracy and QBER sum to one."""
    for seed in range(5):
        t = bb84_run(300, eve=True, seed=seed)
        m = sample_metrics(t, engine)
        assert m.scalars.accuracy == pytest.approx(1.0 - m.qber_all, abs=1e-12)


def test_sample_metrics_on_clean_bb84(engine):
    """A clean channel has zero sifted QBER and a sift fraction near 1/2."""
    m = sample_metrics(bb84_run(2000, seed=3), engine)
    assert m.qber_sifted == 0.0
    assert not m.sifted_empty
    assert m.sift_fraction == pytest.approx(0.5, abs=0.05)
    assert m.confusion.total == 2000


def test_sample_metrics_flags_empty_sifted_key(engine):
    """A transcript with no conclusive positions reports qber_sifted 0 and the flag."""
    for seed in range(200):
        t = b92_run(1, seed=seed)
        if not t.sifted_key:
            break
    m = sample_metrics(t, engine)
    assert m.sifted_empty
    assert m.qber_sifted == 0.0
    assert m.sift_fraction == 0.0


# ============================================================================
# ROC and AUC
# ============================================================================

def test_perfect_classifier_has_unit_auc(engine):
    curve = engine.roc([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9])
    assert curve.auc == pytest.approx(1.0)
    assert curve.rank_auc == pytest.approx(1.0)


def test_inverted_classifier_has_zero_auc(engine):
    curve = engine.roc([1, 1, 0, 0], [0.1, 0.2, 0.8, 0.9])
    assert curve.auc == pytest.approx(0.0)


def test_roc_anchors_and_monotone(engine):
    """Points run from (0, 0) to (1, 1) without stepping back."""
    rng = np.random.default_rng(5)
    truth = [0, 1] + rng.integers(0, 2, 100).tolist()
    scores = rng.random(102).tolist()
    curve = engine.roc(truth, scores)
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)
    fpr = np.array([p[0] for p in curve.points])
    tpr = np.array([p[1] for p in curve.points])
    assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)


def test_trapezoid_auc_equals_rank_auc(engine):
    """The area under the points equals the Mann-Whitney statistic, ties included."""
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(4, 80))
        truth = [0, 1] + rng.integers(0, 2, n).tolist()
        # coarse scores force ties
        scores = (rng.integers(0, 5, n + 2) / 4).tolist()
        curve = engine.roc(truth, scores)
        assert curve.auc == pytest.approx(rank_auc(truth, scores), abs=1e-9)


def test_constant_scores_give_half(engine):
    assert engine.roc([0, 1, 0, 1], [0.5] * 4).auc == pytest.approx(0.5)


def test_roc_single_class_is_undefined(engine):
    with pytest.raises(MetricError):
        engine.roc([1, 1, 1], [0.2, 0.4, 0.9])
    with pytest.raises(MetricError):
        rank_auc([0, 0], [0.1, 0.2])


def test_roc_rejects_scores_outside_unit_interval(engine):
    with pytest.raises(MetricError):
        engine.roc([0, 1], [0.2, 1.5])
    with pytest.raises(MetricError):
        engine.roc([0, 1], [0.2])


def test_roc_curve_validates_its_points():
    """A curve not anchored at the corners, or with a wrong area, is refused."""
    with pytest.raises(MetricError):
        RocCurve(points=((0.0, 0.0), (0.5, 1.0)), auc=0.25, rank_auc=0.25)
    with pytest.raises(MetricError):
        RocCurve(points=((0.0, 0.0), (1.0, 1.0)), auc=0.9, rank_auc=0.9)


# ============================================================================
# Summaries
# ============================================================================

def test_mean_std_population_and_format():
    ms = MeanStd.of([0.7, 0.8])
    assert ms.mean == pytest.approx(0.75)
    assert ms.std == pytest.approx(0.05)
    assert str(ms) == "0.750 ± 0.050"


def test_summarize_over_samples(engine):
    transcripts = [bb84_run(200, seed=s) for s in range(4)]
    summary = summarize_transcripts(transcripts, engine)
    assert summary.samples == 4
    assert summary.qber_sifted.mean == 0.0
    assert summary.accuracy.mean == pytest.approx(0.75, abs=0.08)
    assert summary.accuracy.mean == pytest.approx(1.0 - summary.qber_all.mean, abs=1e-12)


def test_summarize_needs_samples():
    with pytest.raises(MetricError):
        summarize([])
