"""
QNN-integrated protocols.

Each sample trains the PQC on a fresh batch of key bits, freezes it
and scores a second, independent batch. With training disabled the
PQC stays at the given (or all-zero) angles, which reproduces the
underlying protocol exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

from ..entities import QrlConfig, TrainingConfig
from ..exceptions import LearningError
from ..metrics import MetricsSummary, summarize_transcripts
from ..ports.metrics_engine import MetricsEngine
from ..ports.optimizer import PqcOptimizer
from ..protocols.b92 import B92Protocol, b92_bob_state
from ..protocols.bb84 import BB84Protocol, bb84_bob_state
from ..quantum.noise import KrausChannel
from ..utils.seeding import derive_seed, make_rng
from ..value_objects import (
    Ansatz,
    B92Mode,
    Basis,
    PqcParams,
    ProtocolName,
    ProtocolTranscript,
    QrlVersion,
)
from .pqc import MseObjective, TrainingExample, TrainingTrace, with_context
from .qrl import qrl_bob_state, qrl_learn_bits, transcript_from_results


@dataclass(frozen=True)
class QnnRunResult:
    """
    Evaluation transcripts, the frozen PQC and the training trace of
    every sample (traces are absent when training is disabled).
    """

    transcripts: Tuple[ProtocolTranscript, ...]
    params: Tuple[PqcParams, ...]
    traces: Tuple[Optional[TrainingTrace], ...]

    def summary(self, engine: MetricsEngine) -> MetricsSummary:
        return summarize_transcripts(self.transcripts, engine)


def default_ansatz(protocol: ProtocolName) -> Ansatz:
    return Ansatz.BASIS_AWARE if ProtocolName(protocol) is ProtocolName.QNN_BB84 else Ansatz.SINGLE


def sample_seeds(config: TrainingConfig, s: int) -> Tuple[int, int]:
    """(training seed, evaluation seed) of sample `s`."""
    sample_seed = derive_seed(config.seed, "sample", s)
    return derive_seed(sample_seed, "train"), derive_seed(sample_seed, "eval")


def fit_pqc(
    batch: Sequence[TrainingExample],
    start: PqcParams,
    config: TrainingConfig,
    optimizer: PqcOptimizer,
) -> Tuple[PqcParams, TrainingTrace]:
    """
    Train from `start`; the fitted angles replace `start` only when they
    lower the loss by more than `config.min_improvement`.
    """
    objective = MseObjective(batch, start.ansatz, start.layers)
    trace = optimizer.minimize(objective, start, config)
    if trace.best_loss < trace.initial_loss - config.min_improvement:
        return start.with_thetas(trace.best_thetas), trace
    return start, trace


def _resolve(
    protocol: ProtocolName,
    config: TrainingConfig,
    params: Optional[PqcParams],
    optimizer: Optional[PqcOptimizer],
) -> Tuple[PqcParams, bool]:
    """Starting angles and whether they get trained."""
    if params is not None:
        return params, False
    ansatz = config.ansatz or default_ansatz(protocol)
    start = PqcParams.zeros(ansatz, config.layers)
    if config.train and optimizer is None:
        raise LearningError("Training is enabled but no optimizer was given")
    return start, config.train


def _run_samples(
    protocol: ProtocolName,
    config: TrainingConfig,
    params: Optional[PqcParams],
    optimizer: Optional[PqcOptimizer],
    make_batch: Callable[[int, int, Ansatz], List[TrainingExample]],
    evaluate: Callable[[PqcParams, int], ProtocolTranscript],
) -> QnnRunResult:
    start, train = _resolve(protocol, config, params, optimizer)
    transcripts, fitted, traces = [], [], []
    for s in range(config.samples):
        train_seed, eval_seed = sample_seeds(config, s)
        current, trace = start, None
        if train:
            batch = make_batch(config.key_bits, train_seed, start.ansatz)
            current, trace = fit_pqc(batch, start, config, optimizer)
        transcripts.append(evaluate(current, eval_seed))
        fitted.append(current)
        traces.append(trace)
    return QnnRunResult(tuple(transcripts), tuple(fitted), tuple(traces))


# ---------------------------------------------------------------------------
# QNN-BB84
# ---------------------------------------------------------------------------

def bb84_training_batch(
    n: int,
    seed: int,
    ansatz: Ansatz,
    channel: Optional[KrausChannel] = None,
) -> List[TrainingExample]:
    rng = make_rng(seed)
    bits = rng.integers(0, 2, size=n)
    alice = rng.integers(0, 2, size=n)
    bob = rng.integers(0, 2, size=n)
    batch = []
    for bit, l, m in zip(bits, alice, bob):
        la, mb = Basis.from_bit(l), Basis.from_bit(m)
        state = bb84_bob_state(int(bit), la, mb, channel)
        if Ansatz(ansatz) is Ansatz.BASIS_AWARE:
            state = with_context(state, la.bit ^ mb.bit)
        batch.append(TrainingExample(int(bit), state))
    return batch


def qnn_bb84_run(
    config: TrainingConfig,
    channel: Optional[KrausChannel] = None,
    optimizer: Optional[PqcOptimizer] = None,
    params: Optional[PqcParams] = None,
    eve: bool = False,
) -> QnnRunResult:
    """
    BB84 with the PQC inserted before Bob's measurement. Sifting keeps
    the positions where Alice's and Bob's bases agree.
    """
    def evaluate(p: PqcParams, seed: int) -> ProtocolTranscript:
        protocol = BB84Protocol(channel, eve=eve, shots=config.shots, pqc=p, name=ProtocolName.QNN_BB84)
        return protocol.run(config.key_bits, seed)

    return _run_samples(
        ProtocolName.QNN_BB84,
        config,
        params,
        optimizer,
        lambda n, seed, ansatz: bb84_training_batch(n, seed, ansatz, channel),
        evaluate,
    )


# ---------------------------------------------------------------------------
# QNN-B92
# ---------------------------------------------------------------------------

def b92_training_batch(
    n: int,
    seed: int,
    ansatz: Ansatz,
    channel: Optional[KrausChannel] = None,
) -> List[TrainingExample]:
    rng = make_rng(seed)
    bits = rng.integers(0, 2, size=n)
    bob = rng.integers(0, 2, size=n)
    batch = []
    for bit, m in zip(bits, bob):
        basis = Basis.from_bit(m)
        state = b92_bob_state(int(bit), basis, channel)
        if Ansatz(ansatz) is Ansatz.BASIS_AWARE:
            state = with_context(state, basis.bit)
        batch.append(TrainingExample(int(bit), state))
    return batch


def qnn_b92_run(
    config: TrainingConfig,
    channel: Optional[KrausChannel] = None,
    optimizer: Optional[PqcOptimizer] = None,
    params: Optional[PqcParams] = None,
    mode: B92Mode = B92Mode.LITERAL,
) -> QnnRunResult:
    """
    B92 with the PQC before Bob's measurement. Literal mode sifts on
    "Alice's bit equals Bob's basis bit"; standard mode keeps the
    conclusive outcomes.
    """
    mode = B92Mode(mode)

    def evaluate(p: PqcParams, seed: int) -> ProtocolTranscript:
        protocol = B92Protocol(
            channel,
            shots=config.shots,
            mode=mode,
            pqc=p,
            sift_on_bit_basis=mode is B92Mode.LITERAL,
            name=ProtocolName.QNN_B92,
        )
        return protocol.run(config.key_bits, seed)

    return _run_samples(
        ProtocolName.QNN_B92,
        config,
        params,
        optimizer,
        lambda n, seed, ansatz: b92_training_batch(n, seed, ansatz, channel),
        evaluate,
    )


# ---------------------------------------------------------------------------
# QNN-QRL
# ---------------------------------------------------------------------------

def qnn_qrl_run(
    version: QrlVersion,
    config: TrainingConfig,
    qrl: QrlConfig = QrlConfig(),
    channel: Optional[KrausChannel] = None,
    optimizer: Optional[PqcOptimizer] = None,
    params: Optional[PqcParams] = None,
) -> QnnRunResult:
    """
    Per sample: the learners run with the PQC appended to every
    evaluation circuit, then the PQC is trained on the learned angles
    with theta2 fixed; this alternates `inner_iterations` times. The
    frozen PQC is then scored on freshly learned bits.
    """
    version = QrlVersion(version)
    protocol = ProtocolName.QNN_QRL_V1 if version is QrlVersion.V1 else ProtocolName.QNN_QRL_V2
    start, train = _resolve(protocol, config, params, optimizer)
    if start.ansatz is not Ansatz.SINGLE:
        raise LearningError("QNN-QRL decodes a single qubit; use the 'single' ansatz")
    qrl = replace(qrl, shots=config.shots)

    transcripts, fitted, traces = [], [], []
    for s in range(config.samples):
        train_seed, eval_seed = sample_seeds(config, s)
        current, trace = start, None
        if train:
            for inner in range(config.inner_iterations):
                results = qrl_learn_bits(
                    version, config.key_bits, qrl, derive_seed(train_seed, inner), channel, current
                )
                batch = [
                    TrainingExample(r.true_bit, qrl_bob_state(r.true_bit, r.theta1, r.theta2_final, channel))
                    for r in results
                ]
                current, trace = fit_pqc(batch, current, config, optimizer)
        results = qrl_learn_bits(version, config.key_bits, qrl, eval_seed, channel, current)
        transcripts.append(transcript_from_results(results, eval_seed))
        fitted.append(current)
        traces.append(trace)
    return QnnRunResult(tuple(transcripts), tuple(fitted), tuple(traces))

