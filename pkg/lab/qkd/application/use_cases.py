"""
Experiment use cases built on top of the domain layer.

These use cases turn an ExperimentConfig into protocol runs, score
them through the MetricsEngine port and persist every artifact
through the ReportWriter port: single runs, comparison tables, noise
sweeps, learner convergence trajectories and PQC training traces.
"""

from __future__ import annotations

import asyncio
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from lab.qkd.domain.entities import ExperimentConfig, TrainingConfig, fingerprint_of
from lab.qkd.domain.exceptions import ConfigError, LearningError
from lab.qkd.domain.learning.pqc import TrainingExample, TrainingTrace
from lab.qkd.domain.learning.qnn import (
    b92_training_batch,
    bb84_training_batch,
    default_ansatz,
    fit_pqc,
    qnn_b92_run,
    qnn_bb84_run,
    qnn_qrl_run,
    sample_seeds,
)
from lab.qkd.domain.learning.qrl import (
    LandscapePoint,
    learner_for,
    qrl_bob_state,
    qrl_keygen,
    qrl_learn_bits,
    reward_landscape,
)
from lab.qkd.domain.metrics import (
    MetricsSummary,
    RocCurve,
    SampleMetrics,
    sample_metrics,
    summarize,
)
from lab.qkd.domain.ports import MetricsEngine, PqcOptimizer, ReportWriter
from lab.qkd.domain.protocols import B92Protocol, BB84Protocol, estimate_qber
from lab.qkd.domain.quantum.noise import KrausChannel, build_channel
from lab.qkd.domain.utils.decorators import logged
from lab.qkd.domain.utils.seeding import derive_seed, make_rng
from lab.qkd.domain.value_objects import (
    ChannelKind,
    OptimizerKind,
    PqcParams,
    ProtocolName,
    ProtocolTranscript,
    QberDefinition,
    QberReport,
    QrlRunResult,
    QrlVersion,
)


NOISELESS = "noiseless"
EVE_PROTOCOLS = frozenset({ProtocolName.BB84, ProtocolName.B92, ProtocolName.QNN_BB84})

TRANSCRIPT_COLUMNS = (
    "sample", "position", "alice_bit", "alice_basis", "bob_basis",
    "bob_bit", "conclusive", "score", "theta1", "theta2",
)
METRICS_COLUMNS = (
    "sample", "accuracy", "precision", "recall", "f1", "qber_sifted",
    "qber_all", "sift_fraction", "sifted_empty", "qber_estimate",
    "qber_checked", "aborted",
)
CONFUSION_COLUMNS = ("sample", "tp", "fp", "tn", "fn")
ROC_COLUMNS = ("fpr", "tpr", "threshold")
SUMMARY_COLUMNS = ("metric", "mean", "std")
TABLE_COLUMNS = ("Algorithm", "Accuracy", "Precision", "Recall", "F1", "QBER")
TABLE_CSV_COLUMNS = (
    "algorithm", "protocol", "samples", "n_bits",
    "accuracy_mean", "accuracy_std", "precision_mean", "precision_std",
    "recall_mean", "recall_std", "f1_mean", "f1_std",
    "qber_sifted_mean", "qber_sifted_std", "qber_all_mean", "qber_all_std",
    "sift_fraction_mean",
)
SWEEP_COLUMNS = (
    "protocol", "channel", "strength", "accuracy_mean", "accuracy_std",
    "precision_mean", "recall_mean", "f1_mean", "qber_sifted_mean",
    "qber_sifted_std", "qber_all_mean", "qber_all_std",
    "sift_fraction_mean", "samples", "n_bits", "seed",
)
EPISODE_COLUMNS = (
    "trial", "episode", "n1", "n2", "n3", "width", "theta1", "theta2",
    "delta_theta", "p0", "p1", "reward", "distance_to_target",
)
TRIAL_COLUMNS = (
    "trial", "bit", "theta1", "theta2_final", "delta_theta", "decoded_bit",
    "converged", "convergence_iteration", "episodes",
)
LANDSCAPE_COLUMNS = (
    "delta_theta", "p0_given0", "p1_given0", "p0_given1", "p1_given1",
    "reward_bit0", "reward_bit1",
)


# ---------------------------------------------------------------------------
# Protocol dispatch
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolRun:
    """
    The S evaluation transcripts of one configuration, plus the frozen
    PQC and training trace of each sample for the QNN protocols.
    """

    protocol: ProtocolName
    seed: int
    transcripts: Tuple[ProtocolTranscript, ...]
    params: Tuple[Optional[PqcParams], ...] = ()
    traces: Tuple[Optional[TrainingTrace], ...] = ()


def cell_seed(base: int, protocol: ProtocolName, kind: Optional[ChannelKind], strength: float) -> int:
    """
    Seed of one (protocol, channel, strength) cell; `run` and `sweep`
    share it, so a single run reproduces the matching sweep cell.
    """
    return derive_seed(base, protocol, kind if kind is not None else NOISELESS, float(strength))


def make_channel(kind: Optional[ChannelKind], strength: float) -> Optional[KrausChannel]:
    return None if kind is None else build_channel(kind, strength)


def training_for(config: ExperimentConfig, seed: int) -> TrainingConfig:
    """The run's TrainingConfig with the experiment's sizes and seed."""
    return replace(
        config.training,
        samples=config.samples,
        key_bits=config.n_bits,
        shots=config.shots,
        seed=seed,
    )


class ProtocolRunner:
    """
    Runs any of the eight protocols for S samples.

    Baseline samples use `derive_seed(seed, "sample", s)`; the QNN
    protocols derive their training and evaluation seeds the same way.
    """

    def __init__(self, optimizers: Mapping[OptimizerKind, PqcOptimizer]) -> None:
        self._optimizers = dict(optimizers)
        self._runners: Dict[ProtocolName, Callable[..., ProtocolRun]] = {
            ProtocolName.BB84: self._bb84,
            ProtocolName.B92: self._b92,
            ProtocolName.QRL_V1: self._qrl,
            ProtocolName.QRL_V2: self._qrl,
            ProtocolName.QNN_BB84: self._qnn,
            ProtocolName.QNN_B92: self._qnn,
            ProtocolName.QNN_QRL_V1: self._qnn,
            ProtocolName.QNN_QRL_V2: self._qnn,
        }

    def optimizer_for(self, training: TrainingConfig) -> Optional[PqcOptimizer]:
        if not training.train:
            return None
        try:
            return self._optimizers[training.optimizer]
        except KeyError:
            raise ConfigError(
                f"No optimizer registered for {training.optimizer.value!r}. "
                f"Available: {sorted(k.value for k in self._optimizers)}"
            )

    def run(
        self,
        config: ExperimentConfig,
        kind: Optional[ChannelKind] = None,
        strength: float = 0.0,
    ) -> ProtocolRun:
        if config.eve and config.protocol not in EVE_PROTOCOLS:
            raise ConfigError(
                f"The eavesdropper is modelled for {sorted(p.value for p in EVE_PROTOCOLS)}, "
                f"not {config.protocol.value!r}"
            )
        seed = cell_seed(config.seed, config.protocol, kind, strength)
        return self._runners[config.protocol](config, make_channel(kind, strength), seed)

    @staticmethod
    def _sample_seed(seed: int, s: int) -> int:
        return derive_seed(seed, "sample", s)

    def _bb84(self, config: ExperimentConfig, channel: Optional[KrausChannel], seed: int) -> ProtocolRun:
        protocol = BB84Protocol(channel, eve=config.eve, shots=config.shots)
        transcripts = [protocol.run(config.n_bits, self._sample_seed(seed, s)) for s in range(config.samples)]
        return ProtocolRun(config.protocol, seed, tuple(transcripts))

    def _b92(self, config: ExperimentConfig, channel: Optional[KrausChannel], seed: int) -> ProtocolRun:
        protocol = B92Protocol(channel, shots=config.shots, mode=config.resolved_b92_mode, eve=config.eve)
        transcripts = [protocol.run(config.n_bits, self._sample_seed(seed, s)) for s in range(config.samples)]
        return ProtocolRun(config.protocol, seed, tuple(transcripts))

    def _qrl(self, config: ExperimentConfig, channel: Optional[KrausChannel], seed: int) -> ProtocolRun:
        version = QrlVersion.V1 if config.protocol is ProtocolName.QRL_V1 else QrlVersion.V2
        qrl = replace(config.qrl, shots=config.shots)
        transcripts = [
            qrl_keygen(version, config.n_bits, qrl, self._sample_seed(seed, s), channel)
            for s in range(config.samples)
        ]
        return ProtocolRun(config.protocol, seed, tuple(transcripts))

    def _qnn(self, config: ExperimentConfig, channel: Optional[KrausChannel], seed: int) -> ProtocolRun:
        training = training_for(config, seed)
        optimizer = self.optimizer_for(training)
        match config.protocol:
            case ProtocolName.QNN_BB84:
                result = qnn_bb84_run(training, channel, optimizer, eve=config.eve)
            case ProtocolName.QNN_B92:
                result = qnn_b92_run(training, channel, optimizer, mode=config.resolved_b92_mode)
            case ProtocolName.QNN_QRL_V1:
                result = qnn_qrl_run(QrlVersion.V1, training, config.qrl, channel, optimizer)
            case _:
                result = qnn_qrl_run(QrlVersion.V2, training, config.qrl, channel, optimizer)
        return ProtocolRun(config.protocol, seed, result.transcripts, result.params, result.traces)


def _check_reports(run: ProtocolRun, config: ExperimentConfig) -> List[Optional[QberReport]]:
    """QBER estimate and abort decision per sample; None when nothing was sifted."""
    reports = []
    for t in run.transcripts:
        if not t.sifted_key:
            reports.append(None)
            continue
        reports.append(
            estimate_qber(t, config.sample_fraction, config.threshold, derive_seed(t.seed, "qber"))
        )
    return reports


def _headline_qber(summary: MetricsSummary, definition: QberDefinition):
    return summary.qber_sifted if definition is QberDefinition.SIFTED else summary.qber_all


def _metadata(config: ExperimentConfig, **extra: Any) -> Dict[str, Any]:
    return {"seed": config.seed, "config_hash": config.fingerprint(), **extra}


# ---------------------------------------------------------------------------
# Single run
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunReport:
    summary: MetricsSummary
    samples: Tuple[SampleMetrics, ...]
    qber_reports: Tuple[Optional[QberReport], ...]
    roc: Optional[RocCurve]
    files: Tuple[Path, ...]

    @property
    def aborted(self) -> int:
        return sum(1 for r in self.qber_reports if r is not None and r.aborted)


def _transcript_rows(transcripts: Sequence[ProtocolTranscript]) -> List[Dict[str, Any]]:
    rows = []
    for s, t in enumerate(transcripts):
        for i in range(t.n):
            theta1, theta2 = t.angles[i] if t.angles is not None else (None, None)
            rows.append({
                "sample": s,
                "position": i,
                "alice_bit": t.alice_bits[i],
                "alice_basis": t.alice_bases[i].value if t.alice_bases is not None else "",
                "bob_basis": t.bob_bases[i].value,
                "bob_bit": t.bob_bits[i],
                "conclusive": int(t.conclusive_mask[i]),
                "score": t.scores[i],
                "theta1": theta1,
                "theta2": theta2,
            })
    return rows


class RunSingleUseCase:
    """
    One configuration end to end: transcripts, per-sample metrics,
    confusion matrices, the pooled ROC curve, a summary and a manifest.
    """

    def __init__(self, runner: ProtocolRunner, metrics: MetricsEngine, writer: ReportWriter) -> None:
        self._runner = runner
        self._metrics = metrics
        self._writer = writer

    @logged(logger_name="qkd.application.run_single", level=logging.INFO)
    async def execute(self, config: ExperimentConfig) -> RunReport:
        run = await asyncio.to_thread(self._runner.run, config, config.channel, config.strength)
        samples = [sample_metrics(t, self._metrics) for t in run.transcripts]
        summary = summarize(samples)
        reports = _check_reports(run, config)
        meta = _metadata(config, protocol=config.protocol.value)

        files = [
            self._writer.write_table("transcript", _transcript_rows(run.transcripts), TRANSCRIPT_COLUMNS, meta),
            self._writer.write_table("metrics", self._metric_rows(samples, reports), METRICS_COLUMNS, meta),
            self._writer.write_table("confusion", self._confusion_rows(samples), CONFUSION_COLUMNS, meta),
            self._writer.write_table("summary", self._summary_rows(summary), SUMMARY_COLUMNS, meta),
        ]

        roc = self._pooled_roc(run.transcripts)
        if roc is not None:
            rows = [
                {"fpr": f, "tpr": t, "threshold": th}
                for (f, t), th in zip(roc.points, roc.thresholds)
            ]
            files.append(self._writer.write_table("roc", rows, ROC_COLUMNS, {**meta, "auc": f"{roc.auc:.12g}"}))

        aborted = sum(1 for r in reports if r is not None and r.aborted)
        files.append(self._writer.write_manifest({
            "command": "run",
            "config": config.to_dict(),
            "config_hash": config.fingerprint(),
            "seed": config.seed,
            "cell_seed": run.seed,
            "aborted_samples": aborted,
            "auc": roc.auc if roc is not None else None,
        }))
        return RunReport(summary, tuple(samples), tuple(reports), roc, tuple(files))

    def _pooled_roc(self, transcripts: Sequence[ProtocolTranscript]) -> Optional[RocCurve]:
        truth = [b for t in transcripts for b in t.alice_bits]
        scores = [p for t in transcripts for p in t.scores]
        if len(set(truth)) < 2:
            return None
        return self._metrics.roc(truth, scores)

    @staticmethod
    def _metric_rows(samples: Sequence[SampleMetrics], reports: Sequence[Optional[QberReport]]) -> List[Dict[str, Any]]:
        rows = []
        for s, (m, report) in enumerate(zip(samples, reports)):
            rows.append({
                "sample": s,
                "accuracy": m.scalars.accuracy,
                "precision": m.scalars.precision,
                "recall": m.scalars.recall,
                "f1": m.scalars.f1,
                "qber_sifted": m.qber_sifted,
                "qber_all": m.qber_all,
                "sift_fraction": m.sift_fraction,
                "sifted_empty": int(m.sifted_empty),
                "qber_estimate": report.qber if report else None,
                "qber_checked": report.checked_bits if report else 0,
                "aborted": int(report.aborted) if report else None,
            })
        return rows

    @staticmethod
    def _confusion_rows(samples: Sequence[SampleMetrics]) -> List[Dict[str, Any]]:
        rows = [
            {"sample": s, "tp": m.confusion.tp, "fp": m.confusion.fp, "tn": m.confusion.tn, "fn": m.confusion.fn}
            for s, m in enumerate(samples)
        ]
        total = samples[0].confusion
        for m in samples[1:]:
            total = total + m.confusion
        rows.append({"sample": "all", "tp": total.tp, "fp": total.fp, "tn": total.tn, "fn": total.fn})
        return rows

    @staticmethod
    def _summary_rows(summary: MetricsSummary) -> List[Dict[str, Any]]:
        names = ("accuracy", "precision", "recall", "f1", "qber_sifted", "qber_all", "sift_fraction")
        return [
            {"metric": name, "mean": getattr(summary, name).mean, "std": getattr(summary, name).std}
            for name in names
        ]


# ---------------------------------------------------------------------------
# Comparison table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableReport:
    rows: Tuple[Dict[str, Any], ...]
    summaries: Tuple[MetricsSummary, ...]
    text: str
    path: Path


class RunTableUseCase:
    """
    One comparison row per configuration, in the order given:
    Algorithm | Accuracy | Precision | Recall | F1 | QBER.
    """

    def __init__(self, runner: ProtocolRunner, metrics: MetricsEngine, writer: ReportWriter) -> None:
        self._runner = runner
        self._metrics = metrics
        self._writer = writer

    def _summary(self, config: ExperimentConfig) -> MetricsSummary:
        run = self._runner.run(config, config.channel, config.strength)
        return summarize([sample_metrics(t, self._metrics) for t in run.transcripts])

    @logged(logger_name="qkd.application.run_table", level=logging.INFO)
    async def execute(self, configs: Sequence[ExperimentConfig]) -> TableReport:
        if not configs:
            raise ConfigError("A comparison table needs at least one configuration")
        semaphore = asyncio.Semaphore(configs[0].workers)

        async def one(config: ExperimentConfig) -> MetricsSummary:
            async with semaphore:
                return await asyncio.to_thread(self._summary, config)

        summaries = await asyncio.gather(*(one(c) for c in configs))

        display, numeric = [], []
        for config, summary in zip(configs, summaries):
            headline = _headline_qber(summary, config.qber_def)
            display.append({
                "Algorithm": config.protocol.label,
                "Accuracy": str(summary.accuracy),
                "Precision": str(summary.precision),
                "Recall": str(summary.recall),
                "F1": str(summary.f1),
                "QBER": str(headline),
            })
            numeric.append({
                "algorithm": config.protocol.label,
                "protocol": config.protocol.value,
                "samples": summary.samples,
                "n_bits": config.n_bits,
                "accuracy_mean": summary.accuracy.mean,
                "accuracy_std": summary.accuracy.std,
                "precision_mean": summary.precision.mean,
                "precision_std": summary.precision.std,
                "recall_mean": summary.recall.mean,
                "recall_std": summary.recall.std,
                "f1_mean": summary.f1.mean,
                "f1_std": summary.f1.std,
                "qber_sifted_mean": summary.qber_sifted.mean,
                "qber_sifted_std": summary.qber_sifted.std,
                "qber_all_mean": summary.qber_all.mean,
                "qber_all_std": summary.qber_all.std,
                "sift_fraction_mean": summary.sift_fraction.mean,
            })

        hashes = [c.fingerprint() for c in configs]
        meta = {"seed": configs[0].seed, "config_hash": fingerprint_of(hashes)}
        path = self._writer.write_table("table", numeric, TABLE_CSV_COLUMNS, meta)
        self._writer.write_manifest({
            "command": "table",
            "configs": [c.to_dict() for c in configs],
            "config_hash": meta["config_hash"],
            "seed": configs[0].seed,
        })
        text = self._writer.render_table(display, TABLE_COLUMNS)
        return TableReport(tuple(display), tuple(summaries), text, path)


# ---------------------------------------------------------------------------
# Noise sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    protocol: ProtocolName
    channel: ChannelKind
    strength: float
    summary: MetricsSummary
    seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: Tuple[SweepRow, ...]
    path: Path

    def accuracy(self, channel: ChannelKind, strength: float) -> float:
        for row in self.rows:
            if row.channel is ChannelKind(channel) and row.strength == strength:
                return row.summary.accuracy.mean
        raise KeyError((channel, strength))


class RunSweepUseCase:
    """
    Full factorial over (channel kind, strength) for one protocol.

    Cells run in a bounded pool of worker threads; each cell seeds
    itself from (seed, protocol, kind, strength), so the rows do not
    depend on completion order.
    """

    def __init__(self, runner: ProtocolRunner, metrics: MetricsEngine, writer: ReportWriter) -> None:
        self._runner = runner
        self._metrics = metrics
        self._writer = writer

    def _cell(self, config: ExperimentConfig, kind: ChannelKind, strength: float) -> SweepRow:
        run = self._runner.run(config, kind, strength)
        summary = summarize([sample_metrics(t, self._metrics) for t in run.transcripts])
        return SweepRow(config.protocol, kind, strength, summary, run.seed)

    @logged(logger_name="qkd.application.run_sweep", level=logging.INFO)
    async def execute(self, config: ExperimentConfig) -> SweepResult:
        semaphore = asyncio.Semaphore(config.workers)

        async def one(kind: ChannelKind, strength: float) -> SweepRow:
            async with semaphore:
                return await asyncio.to_thread(self._cell, config, kind, strength)

        cells = [(kind, strength) for kind in config.kinds for strength in config.grid]
        rows = await asyncio.gather(*(one(k, s) for k, s in cells))

        records = [
            {
                "protocol": r.protocol.value,
                "channel": r.channel.value,
                "strength": r.strength,
                "accuracy_mean": r.summary.accuracy.mean,
                "accuracy_std": r.summary.accuracy.std,
                "precision_mean": r.summary.precision.mean,
                "recall_mean": r.summary.recall.mean,
                "f1_mean": r.summary.f1.mean,
                "qber_sifted_mean": r.summary.qber_sifted.mean,
                "qber_sifted_std": r.summary.qber_sifted.std,
                "qber_all_mean": r.summary.qber_all.mean,
                "qber_all_std": r.summary.qber_all.std,
                "sift_fraction_mean": r.summary.sift_fraction.mean,
                "samples": r.summary.samples,
                "n_bits": config.n_bits,
                "seed": r.seed,
            }
            for r in rows
        ]
        path = self._writer.write_table(f"sweep_{config.protocol.value}", records, SWEEP_COLUMNS, _metadata(config))
        self._writer.write_manifest({
            "command": "sweep",
            "config": config.to_dict(),
            "config_hash": config.fingerprint(),
            "seed": config.seed,
            "samples": config.samples,
            "n_bits": config.n_bits,
            "cells": len(rows),
        })
        return SweepResult(tuple(rows), path)


# ---------------------------------------------------------------------------
# Learner convergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    version: QrlVersion
    results: Tuple[QrlRunResult, ...]
    episodes_path: Path
    trials_path: Path


class RunConvergenceUseCase:
    """
    Per-episode trajectories of the QRL learners over independent
    trials with random (bit, theta1).
    """

    def __init__(self, writer: ReportWriter) -> None:
        self._writer = writer

    @staticmethod
    def _trial(config: ExperimentConfig, version: QrlVersion, trial: int) -> QrlRunResult:
        seed = derive_seed(config.seed, "trial", version, trial)
        rng = make_rng(seed)
        bit = int(rng.integers(0, 2))
        theta1 = float(rng.uniform(0.0, math.pi))
        learn = learner_for(version)
        return learn(
            bit,
            theta1,
            max_episodes=config.qrl.budget(version),
            epsilon=config.qrl.epsilon,
            target=config.qrl.target,
            shots=config.shots,
            channel=make_channel(config.channel, config.strength),
            seed=derive_seed(seed, "learner"),
            mode=config.qrl.mode,
        )

    @logged(logger_name="qkd.application.run_convergence", level=logging.INFO)
    async def execute(self, version: QrlVersion, config: ExperimentConfig) -> ConvergenceReport:
        version = QrlVersion(version)
        results = [self._trial(config, version, t) for t in range(config.trials)]

        episodes, trials = [], []
        for t, r in enumerate(results):
            for e in r.episode_log.records:
                episodes.append({
                    "trial": t,
                    "episode": e.episode,
                    "n1": e.n1,
                    "n2": e.n2,
                    "n3": e.n3,
                    "width": e.n3 - e.n1,
                    "theta1": r.theta1,
                    "theta2": e.theta2,
                    "delta_theta": e.delta_theta,
                    "p0": e.p0,
                    "p1": e.p1,
                    "reward": e.reward,
                    "distance_to_target": e.distance_to_target,
                })
            trials.append({
                "trial": t,
                "bit": r.true_bit,
                "theta1": r.theta1,
                "theta2_final": r.theta2_final,
                "delta_theta": r.delta_theta,
                "decoded_bit": r.decoded_bit,
                "converged": int(r.converged),
                "convergence_iteration": r.episode_log.convergence_iteration,
                "episodes": len(r.episode_log),
            })

        meta = _metadata(config, version=version.value)
        episodes_path = self._writer.write_table(f"convergence_{version.value}", episodes, EPISODE_COLUMNS, meta)
        trials_path = self._writer.write_table(f"convergence_{version.value}_trials", trials, TRIAL_COLUMNS, meta)
        self._writer.write_manifest({
            "command": "converge",
            "version": version.value,
            "config": config.to_dict(),
            "config_hash": config.fingerprint(),
            "seed": config.seed,
            "trials": config.trials,
        })
        return ConvergenceReport(version, tuple(results), episodes_path, trials_path)


# ---------------------------------------------------------------------------
# Reward landscape
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LandscapeReport:
    points: Tuple[LandscapePoint, ...]
    path: Path


class RunLandscapeUseCase:
    """
    P(outcome | bit) and the reward on an even grid of delta_theta over
    [-pi, pi], through the configured channel.
    """

    def __init__(self, writer: ReportWriter) -> None:
        self._writer = writer

    @logged(logger_name="qkd.application.run_landscape", level=logging.INFO)
    async def execute(
        self, config: ExperimentConfig, points: int = 201, theta1: float = math.pi / 2
    ) -> LandscapeReport:
        if points < 2:
            raise ConfigError(f"A landscape needs at least two points, got {points}")
        deltas = np.linspace(-math.pi, math.pi, points)
        channel = make_channel(config.channel, config.strength)
        try:
            landscape = reward_landscape(deltas, theta1, channel)
        except LearningError as exc:
            raise ConfigError(str(exc)) from exc

        rows = [
            {
                "delta_theta": p.delta_theta,
                "p0_given0": p.p0_given0,
                "p1_given0": p.p1_given0,
                "p0_given1": p.p0_given1,
                "p1_given1": p.p1_given1,
                "reward_bit0": p.reward_bit0,
                "reward_bit1": p.reward_bit1,
            }
            for p in landscape
        ]
        channel_name = config.channel.value if config.channel is not None else NOISELESS
        meta = _metadata(config, channel=channel_name, strength=config.strength, theta1=theta1)
        path = self._writer.write_table("landscape", rows, LANDSCAPE_COLUMNS, meta)
        self._writer.write_manifest({
            "command": "landscape",
            "config": config.to_dict(),
            "config_hash": config.fingerprint(),
            "seed": config.seed,
            "points": points,
            "theta1": theta1,
        })
        return LandscapeReport(tuple(landscape), path)


# ---------------------------------------------------------------------------
# PQC training
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainReport:
    params: PqcParams
    trace: TrainingTrace
    path: Path


class TrainUseCase:
    """
    Trains the PQC of a QNN protocol on one batch of key bits and
    writes the loss trace (iteration, loss, theta_0 .. theta_{d-1}).
    """

    def __init__(self, runner: ProtocolRunner, writer: ReportWriter) -> None:
        self._runner = runner
        self._writer = writer

    def _batch(self, config: ExperimentConfig, training: TrainingConfig, start: PqcParams, seed: int) -> List[TrainingExample]:
        channel = make_channel(config.channel, config.strength)
        match config.protocol:
            case ProtocolName.QNN_BB84:
                return bb84_training_batch(training.key_bits, seed, start.ansatz, channel)
            case ProtocolName.QNN_B92:
                return b92_training_batch(training.key_bits, seed, start.ansatz, channel)
            case _:
                version = QrlVersion.V1 if config.protocol is ProtocolName.QNN_QRL_V1 else QrlVersion.V2
                qrl = replace(config.qrl, shots=training.shots)
                results = qrl_learn_bits(version, training.key_bits, qrl, seed, channel, start)
                return [
                    TrainingExample(r.true_bit, qrl_bob_state(r.true_bit, r.theta1, r.theta2_final, channel))
                    for r in results
                ]

    @logged(logger_name="qkd.application.train", level=logging.INFO)
    async def execute(self, config: ExperimentConfig) -> TrainReport:
        if not config.protocol.uses_pqc:
            raise ConfigError(f"Protocol {config.protocol.value!r} has no PQC to train")
        if not config.training.train:
            raise ConfigError("The train command needs training enabled")

        seed = cell_seed(config.seed, config.protocol, config.channel, config.strength)
        training = training_for(config, seed)
        optimizer = self._runner.optimizer_for(training)
        ansatz = training.ansatz or default_ansatz(config.protocol)
        start = PqcParams.zeros(ansatz, training.layers)
        train_seed, _ = sample_seeds(training, 0)

        batch = await asyncio.to_thread(self._batch, config, training, start, train_seed)
        params, trace = await asyncio.to_thread(fit_pqc, batch, start, training, optimizer)

        width = len(start.thetas)
        columns = ("iteration", "loss", *(f"theta_{i}" for i in range(width)))
        rows = [
            {"iteration": e.iteration, "loss": e.loss, **{f"theta_{i}": th for i, th in enumerate(e.thetas)}}
            for e in trace.entries
        ]
        path = self._writer.write_table(f"trace_{config.protocol.value}", rows, columns, _metadata(config))
        self._writer.write_manifest({
            "command": "train",
            "config": config.to_dict(),
            "config_hash": config.fingerprint(),
            "seed": config.seed,
            "best_loss": trace.best_loss,
            "initial_loss": trace.initial_loss,
            "thetas": list(params.thetas),
        })
        return TrainReport(params, trace, path)
