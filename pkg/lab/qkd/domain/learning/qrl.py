"""
Reinforcement-learning search for Bob's decoding angle.

Alice encodes her bit k as  |k> -H- P(theta1) ; Bob decodes with
P(-theta2) -H- [PQC] and measures. Without noise
P(k) = (1 + cos(theta1 - theta2)) / 2, and the reward of a candidate
theta2 is max(P0, P1).

QRL-V1 bisects [0, pi] on the rewards of the two quarter points.
QRL-V2 draws its candidates uniformly inside the current bracket and
narrows around the best evaluated point.

The reward repeats every pi, so the best angle can land a half turn
away from theta1 and decode the inverted bit. When the final angle and
its half-turn alias tie on reward, the one that reads Alice's bit wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..entities import QrlConfig
from ..exceptions import LearningError
from ..quantum.gates import H, make_gate
from ..quantum.noise import KrausChannel, apply_channel
from ..quantum.state import DensityMatrix, apply_gate, marginal, measure_distribution, readout, sample_shots
from ..utils.seeding import draw_seeds, make_rng
from ..value_objects import (
    AngleInterval,
    Basis,
    BasisString,
    BitString,
    EpisodeLog,
    EpisodeRecord,
    EvalMode,
    MeasurementDistribution,
    PqcParams,
    ProtocolTranscript,
    QrlRunResult,
    QrlVersion,
)
from .pqc import apply_pqc


NORMALIZATION_TOLERANCE = 1e-9
TIE_TOLERANCE = 1e-12
# reward gap within which a half-turn alias counts as a tie
ALIAS_TOLERANCE = 1e-4


def reward(p0: float, p1: float) -> float:
    """
    max(P0, P1); always in [0.5, 1] for a normalized pair.
    """
    if not (0.0 <= p0 <= 1.0 and 0.0 <= p1 <= 1.0):
        raise LearningError(f"Probabilities must lie in [0, 1], got ({p0}, {p1})")
    if abs(p0 + p1 - 1.0) > NORMALIZATION_TOLERANCE:
        raise LearningError(f"Probabilities must sum to 1, got {p0} + {p1} = {p0 + p1}")
    return max(p0, p1)


# ---------------------------------------------------------------------------
# Circuit
# ---------------------------------------------------------------------------

def qrl_received_state(bit: int, theta1: float, channel: Optional[KrausChannel] = None) -> DensityMatrix:
    """State arriving at Bob: |k> -H- P(theta1) -channel-."""
    state = apply_gate(DensityMatrix.from_bits([bit]), make_gate("P", theta1) @ H)
    return apply_channel(state, channel)


def qrl_decode(received: DensityMatrix, theta2: float) -> DensityMatrix:
    """Bob's decoding -P(-theta2)- -H-, before any PQC."""
    return apply_gate(received, H @ make_gate("P", -theta2))


def qrl_bob_state(bit: int, theta1: float, theta2: float, channel: Optional[KrausChannel] = None) -> DensityMatrix:
    return qrl_decode(qrl_received_state(bit, theta1, channel), theta2)


@dataclass(frozen=True)
class LandscapePoint:
    """
    Outcome probabilities of both key bits at one angle offset
    delta_theta = theta1 - theta2.
    """

    delta_theta: float
    p0_given0: float
    p1_given0: float
    p0_given1: float
    p1_given1: float

    @property
    def reward_bit0(self) -> float:
        return reward(self.p0_given0, self.p1_given0)

    @property
    def reward_bit1(self) -> float:
        return reward(self.p0_given1, self.p1_given1)


def reward_landscape(
    deltas: Sequence[float],
    theta1: float = math.pi / 2,
    channel: Optional[KrausChannel] = None,
) -> List[LandscapePoint]:
    """
    Exact P(outcome | bit) over the offsets the learners search, with
    theta2 = theta1 - delta. A noiseless channel makes the curves depend
    on delta alone; bit flips and damping also depend on theta1.
    """
    if not 0.0 <= theta1 <= math.pi:
        raise LearningError(f"theta1 must lie in [0, pi], got {theta1}")
    points = []
    for delta in deltas:
        theta2 = theta1 - float(delta)
        given0 = measure_distribution(qrl_bob_state(0, theta1, theta2, channel))
        given1 = measure_distribution(qrl_bob_state(1, theta1, theta2, channel))
        points.append(LandscapePoint(float(delta), given0[0], given0[1], given1[0], given1[1]))
    return points


@dataclass(frozen=True)
class _Evaluation:
    p0: float
    p1: float
    reward: float


class _RewardOracle:
    """
    Reward of a candidate theta2 for one (bit, theta1) pair.
    """

    def __init__(
        self,
        bit: int,
        theta1: float,
        channel: Optional[KrausChannel],
        pqc: Optional[PqcParams],
        mode: EvalMode,
        shots: int,
        rng: np.random.Generator,
    ) -> None:
        self._received = qrl_received_state(bit, theta1, channel)
        self._pqc = pqc
        self._mode = EvalMode(mode)
        self._shots = shots
        self._rng = rng

    def final_state(self, theta2: float) -> DensityMatrix:
        state = qrl_decode(self._received, theta2)
        return apply_pqc(state, self._pqc) if self._pqc is not None else state

    def exact(self, theta2: float) -> MeasurementDistribution:
        """Exact (P0, P1) at theta2, whatever the evaluation mode."""
        return marginal(measure_distribution(self.final_state(theta2)))

    def __call__(self, theta2: float) -> _Evaluation:
        dist = self.exact(theta2)
        if self._mode is EvalMode.SAMPLED:
            seed = int(self._rng.integers(0, 2 ** 63 - 1))
            record = sample_shots(dist, self._shots, seed)
            p0, p1 = record.frequency(0), record.frequency(1)
        else:
            p0, p1 = dist[0], dist[1]
        return _Evaluation(p0, p1, reward(p0, p1))


def _argmax_lowest(evaluations: Dict[float, _Evaluation]) -> float:
    """Angle with the highest reward; near-ties go to the lower angle."""
    best_angle, best_reward = None, -math.inf
    for angle in sorted(evaluations):
        r = evaluations[angle].reward
        if r > best_reward + TIE_TOLERANCE:
            best_angle, best_reward = angle, r
    return best_angle


def alias_angle(theta2: float) -> float:
    """
    Closest angle in [0, pi] to theta2 +- pi. Unclamped, the two score
    the same reward and decode opposite bits.
    """
    return math.pi if theta2 < math.pi / 2 else 0.0


def _resolve_alias(oracle: _RewardOracle, bit: int, theta2: float) -> float:
    """
    Swap theta2 for its alias when theta2 reads the inverted bit and the
    alias scores within ALIAS_TOLERANCE of its reward.
    """
    here = oracle.exact(theta2)
    if here[bit] >= 0.5:
        return theta2
    alias = alias_angle(theta2)
    there = oracle.exact(alias)
    tied = reward(there[0], there[1]) >= reward(here[0], here[1]) - ALIAS_TOLERANCE
    if tied and there[bit] > here[bit]:
        return alias
    return theta2


def _check_inputs(bit: int, theta1: float, max_episodes: int, epsilon: float) -> None:
    if bit not in (0, 1):
        raise LearningError(f"Key bit must be 0/1, got {bit}")
    if not 0.0 <= theta1 <= math.pi:
        raise LearningError(f"theta1 must lie in [0, pi], got {theta1}")
    if max_episodes < 1:
        raise LearningError(f"max_episodes must be >= 1, got {max_episodes}")
    if not epsilon > 0:
        raise LearningError(f"epsilon must be positive, got {epsilon}")


def _record(episode: int, interval: AngleInterval, theta1: float, theta2: float, ev: _Evaluation, target: float) -> EpisodeRecord:
    delta = theta1 - theta2
    return EpisodeRecord(
        episode=episode,
        n1=interval.n1,
        n2=interval.n2,
        n3=interval.n3,
        theta2=theta2,
        delta_theta=delta,
        p0=ev.p0,
        p1=ev.p1,
        reward=ev.reward,
        distance_to_target=abs(abs(delta) - target),
    )


def _finish(
    oracle: _RewardOracle,
    bit: int,
    theta1: float,
    evaluations: Dict[float, _Evaluation],
    records: List[EpisodeRecord],
    interval: AngleInterval,
    epsilon: float,
    shots: int,
    rng: np.random.Generator,
) -> QrlRunResult:
    theta2 = _resolve_alias(oracle, bit, _argmax_lowest(evaluations))
    score, decoded = readout(oracle.final_state(theta2), shots, int(rng.integers(0, 2 ** 63 - 1)))
    converged = len(records) if interval.width < epsilon else None
    return QrlRunResult(
        theta1=theta1,
        theta2_final=theta2,
        decoded_bit=decoded,
        true_bit=bit,
        episode_log=EpisodeLog(records=tuple(records), convergence_iteration=converged),
        score=score,
        q_table={angle: ev.reward for angle, ev in sorted(evaluations.items())},
    )


# ---------------------------------------------------------------------------
# Learners
# ---------------------------------------------------------------------------

def qrl_v1_learn(
    bit: int,
    theta1: float,
    max_episodes: int = 1000,
    epsilon: float = 0.01,
    target: float = 1.2,
    shots: int = 1024,
    channel: Optional[KrausChannel] = None,
    seed: int = 0,
    mode: EvalMode = EvalMode.EXACT,
    pqc: Optional[PqcParams] = None,
) -> QrlRunResult:
    """
    Bisection: compare the rewards at m1 = (n1+n2)/2 and m2 = (n2+n3)/2,
    keep the half whose midpoint scores higher (ties keep the lower
    half) and recentre n2. The bracket endpoints are not candidates;
    the Q-table holds n2 and every evaluated midpoint.
    """
    _check_inputs(bit, theta1, max_episodes, epsilon)
    rng = make_rng(seed)
    oracle = _RewardOracle(bit, theta1, channel, pqc, mode, shots, rng)

    interval = AngleInterval.initial()
    evaluations: Dict[float, _Evaluation] = {interval.n2: oracle(interval.n2)}
    records: List[EpisodeRecord] = []

    while len(records) < max_episodes and interval.width >= epsilon:
        m1 = (interval.n1 + interval.n2) / 2
        m2 = (interval.n2 + interval.n3) / 2
        e1, e2 = oracle(m1), oracle(m2)
        evaluations[m1], evaluations[m2] = e1, e2
        if e2.reward > e1.reward + TIE_TOLERANCE:
            interval = AngleInterval(interval.n2, m2, interval.n3)
            kept, ev = m2, e2
        else:
            interval = AngleInterval(interval.n1, m1, interval.n2)
            kept, ev = m1, e1
        records.append(_record(len(records) + 1, interval, theta1, kept, ev, target))

    return _finish(oracle, bit, theta1, evaluations, records, interval, epsilon, shots, rng)


def qrl_v2_learn(
    bit: int,
    theta1: float,
    max_episodes: int = 100,
    epsilon: float = 0.01,
    target: float = 1.2,
    shots: int = 1024,
    channel: Optional[KrausChannel] = None,
    seed: int = 0,
    mode: EvalMode = EvalMode.EXACT,
    pqc: Optional[PqcParams] = None,
) -> QrlRunResult:
    """
    Randomized narrowing: n2 starts uniform in (0, pi); every episode
    draws m1 ~ U(n1, n2) and m2 ~ U(n2, n3). Among n1 < m1 < n2 < m2 < n3
    the best-rewarded point becomes the new n2 and its neighbours the new
    bounds. A best point on the bracket ends leaves the bracket as is,
    since 0 and pi score identically on a pi-periodic reward.
    """
    _check_inputs(bit, theta1, max_episodes, epsilon)
    rng = make_rng(seed)
    oracle = _RewardOracle(bit, theta1, channel, pqc, mode, shots, rng)

    interval = AngleInterval.initial(float(rng.uniform(0.0, math.pi)))
    evaluations: Dict[float, _Evaluation] = {}
    bracket = [oracle(interval.n1), oracle(interval.n2), oracle(interval.n3)]
    for angle, ev in zip((interval.n1, interval.n2, interval.n3), bracket):
        evaluations[angle] = ev
    records: List[EpisodeRecord] = []

    while len(records) < max_episodes and interval.width >= epsilon:
        m1 = float(rng.uniform(interval.n1, interval.n2))
        m2 = float(rng.uniform(interval.n2, interval.n3))
        e1, e2 = oracle(m1), oracle(m2)
        evaluations[m1], evaluations[m2] = e1, e2

        points = [interval.n1, m1, interval.n2, m2, interval.n3]
        scored = [bracket[0], e1, bracket[1], e2, bracket[2]]
        best = 0
        for j in range(1, len(points)):
            if scored[j].reward > scored[best].reward + TIE_TOLERANCE:
                best = j
        if best in (1, 2, 3):
            interval = AngleInterval(points[best - 1], points[best], points[best + 1])
            bracket = scored[best - 1: best + 2]
        records.append(_record(len(records) + 1, interval, theta1, points[best], scored[best], target))

    return _finish(oracle, bit, theta1, evaluations, records, interval, epsilon, shots, rng)


_LEARNERS: dict[QrlVersion, Callable[..., QrlRunResult]] = {
    QrlVersion.V1: qrl_v1_learn,
    QrlVersion.V2: qrl_v2_learn,
}


def learner_for(version: QrlVersion) -> Callable[..., QrlRunResult]:
    try:
        return _LEARNERS[QrlVersion(version)]
    except ValueError:
        raise LearningError(
            f"Unsupported QRL version: {version!r}. Supported: {[v.value for v in QrlVersion]}"
        )


# ---------------------------------------------------------------------------
# Key generation
# ---------------------------------------------------------------------------

def qrl_learn_bits(
    version: QrlVersion,
    n: int,
    config: QrlConfig,
    seed: int,
    channel: Optional[KrausChannel] = None,
    pqc: Optional[PqcParams] = None,
) -> List[QrlRunResult]:
    """
    One learner per key bit with fresh random (bit, theta1).
    """
    if n < 1:
        raise LearningError(f"Key generation needs at least one bit, got n={n}")
    version = QrlVersion(version)
    learn = learner_for(version)
    rng = make_rng(seed)
    bits = rng.integers(0, 2, size=n)
    thetas = rng.uniform(0.0, math.pi, size=n)
    seeds = draw_seeds(rng, n)
    return [
        learn(
            int(bits[i]),
            float(thetas[i]),
            max_episodes=config.budget(version),
            epsilon=config.epsilon,
            target=config.target,
            shots=config.shots,
            channel=channel,
            seed=seeds[i],
            mode=config.mode,
            pqc=pqc,
        )
        for i in range(n)
    ]


def transcript_from_results(results: List[QrlRunResult], seed: int) -> ProtocolTranscript:
    """
    K_b = true bits, K_m = decoded bits, F_k = decoded bits of the
    learners that converged. Bob always decodes in the diagonal basis.
    """
    n = len(results)
    mask = tuple(r.converged for r in results)
    return ProtocolTranscript(
        alice_bits=BitString(tuple(r.true_bit for r in results)),
        alice_bases=None,
        bob_bases=BasisString((Basis.DIAGONAL,) * n),
        bob_bits=BitString(tuple(r.decoded_bit for r in results)),
        conclusive_mask=mask,
        sifted_key=tuple(r.decoded_bit for r in results if r.converged),
        scores=tuple(r.score for r in results),
        seed=seed,
        angles=tuple((r.theta1, r.theta2_final) for r in results),
    )


def qrl_keygen(
    version: QrlVersion,
    n: int,
    config: QrlConfig = QrlConfig(),
    seed: int = 0,
    channel: Optional[KrausChannel] = None,
    pqc: Optional[PqcParams] = None,
) -> ProtocolTranscript:
    return transcript_from_results(qrl_learn_bits(version, n, config, seed, channel, pqc), seed)
