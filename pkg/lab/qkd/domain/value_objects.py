"""
Value Objects for the key distribution domain.

These types encapsulate small concepts with their own invariants,
such as bit strings, bases, measurement distributions or the
QRL search interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence, Tuple

from .exceptions import LearningError, ProtocolError, StateError


PROBABILITY_TOLERANCE = 1e-12


class Basis(str, Enum):
    """
    Measurement / preparation basis of a single qubit.
    """
    RECTILINEAR = "rectilinear"
    DIAGONAL = "diagonal"

    @classmethod
    def from_bit(cls, value: int) -> "Basis":
        return cls.DIAGONAL if int(value) else cls.RECTILINEAR

    @property
    def bit(self) -> int:
        return 1 if self is Basis.DIAGONAL else 0


class ChannelKind(str, Enum):
    """
    Single-qubit noise processes, addressed by kebab-case names.
    """
    BIT_FLIP = "bit-flip"
    PHASE_FLIP = "phase-flip"
    BIT_PHASE_FLIP = "bit-phase-flip"
    DEPOLARIZING = "depolarizing"
    AMPLITUDE_DAMPING = "amplitude-damping"
    PHASE_DAMPING = "phase-damping"


class ProtocolName(str, Enum):
    """
    The eight key agreement protocols of the laboratory.
    """
    BB84 = "bb84"
    B92 = "b92"
    QRL_V1 = "qrl-v1"
    QRL_V2 = "qrl-v2"
    QNN_BB84 = "qnn-bb84"
    QNN_B92 = "qnn-b92"
    QNN_QRL_V1 = "qnn-qrl-v1"
    QNN_QRL_V2 = "qnn-qrl-v2"

    @property
    def label(self) -> str:
        return _PROTOCOL_LABELS[self]

    @property
    def uses_pqc(self) -> bool:
        return self.value.startswith("qnn-")


_PROTOCOL_LABELS: dict[ProtocolName, str] = {
    ProtocolName.BB84: "BB84",
    ProtocolName.B92: "B92",
    ProtocolName.QRL_V1: "QRL-V.1",
    ProtocolName.QRL_V2: "QRL-V.2",
    ProtocolName.QNN_BB84: "QNN-BB84",
    ProtocolName.QNN_B92: "QNN-B92",
    ProtocolName.QNN_QRL_V1: "QNN-QRL-V.1",
    ProtocolName.QNN_QRL_V2: "QNN-QRL-V.2",
}


class QrlVersion(str, Enum):
    """
    Angle search strategy: V1 bisection, V2 randomized narrowing.
    """
    V1 = "v1"
    V2 = "v2"


class B92Mode(str, Enum):
    """
    Conclusive-outcome mapping used by B92. `paper` is accepted as a
    synonym of `literal`.
    """
    LITERAL = "literal"
    STANDARD = "standard"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str) and value.strip().lower() == "paper":
            return cls.LITERAL
        return None

    @classmethod
    def choices(cls) -> list[str]:
        return [m.value for m in cls] + ["paper"]


class EvalMode(str, Enum):
    """
    Exact density-matrix probabilities or shot frequencies.
    """
    EXACT = "exact"
    SAMPLED = "sampled"


class QberDefinition(str, Enum):
    """
    Which QBER is reported in the headline column.
    """
    SIFTED = "sifted"
    ALL = "all"


class OptimizerKind(str, Enum):
    """
    PQC training strategy.
    """
    DERIVATIVE_FREE = "derivative-free"
    GRADIENT_DESCENT = "gradient-descent"


class Ansatz(str, Enum):
    """
    Layout of the parameterized circuit.

    SINGLE acts on the key qubit only (Rz·Ry·Rz per layer).
    BASIS_AWARE appends a controlled-Ry from an ancilla that carries
    the public basis relation of the round.
    """
    SINGLE = "single"
    BASIS_AWARE = "basis-aware"

    @property
    def num_qubits(self) -> int:
        return 2 if self is Ansatz.BASIS_AWARE else 1

    def parameter_count(self, layers: int) -> int:
        return 3 * layers + (1 if self is Ansatz.BASIS_AWARE else 0)


# ---------------------------------------------------------------------------
# Bits and bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BitString:
    """
    Ordered, non-empty sequence of classical bits.
    """

    bits: Tuple[int, ...]

    def __post_init__(self) -> None:
        normalized = tuple(int(b) for b in self.bits)
        if not normalized:
            raise ProtocolError("BitString cannot be empty")
        if any(b not in (0, 1) for b in normalized):
            raise ProtocolError(f"BitString accepts only 0/1, got {sorted(set(normalized))}")
        object.__setattr__(self, "bits", normalized)

    @classmethod
    def parse(cls, text: str) -> "BitString":
        return cls(tuple(int(c) for c in text.strip()))

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, index: int) -> int:
        return self.bits[index]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class BasisString:
    """
    Ordered sequence of bases paired with a BitString.
    """

    bases: Tuple[Basis, ...]

    def __post_init__(self) -> None:
        normalized = tuple(Basis(b) for b in self.bases)
        if not normalized:
            raise ProtocolError("BasisString cannot be empty")
        object.__setattr__(self, "bases", normalized)

    @classmethod
    def from_bits(cls, values: Sequence[int]) -> "BasisString":
        return cls(tuple(Basis.from_bit(v) for v in values))

    def __len__(self) -> int:
        return len(self.bases)

    def __iter__(self) -> Iterator[Basis]:
        return iter(self.bases)

    def __getitem__(self, index: int) -> Basis:
        return self.bases[index]


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementDistribution:
    """
    Probabilities of the computational-basis outcomes, indexed by the
    outcome integer (qubit 0 is the most significant bit).
    """

    probabilities: Tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probabilities)
        if len(probs) not in (2, 4):
            raise StateError(f"Distribution must have 2 or 4 outcomes, got {len(probs)}")
        if any(not math.isfinite(p) for p in probs):
            raise StateError(f"Distribution has non-finite entries: {probs}")
        if any(p < -PROBABILITY_TOLERANCE or p > 1 + PROBABILITY_TOLERANCE for p in probs):
            raise StateError(f"Probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > PROBABILITY_TOLERANCE:
            raise StateError(f"Probabilities must sum to 1, got {sum(probs)!r}")
        object.__setattr__(self, "probabilities", tuple(min(max(p, 0.0), 1.0) for p in probs))

    def __len__(self) -> int:
        return len(self.probabilities)

    def __getitem__(self, outcome: int) -> float:
        return self.probabilities[outcome]


@dataclass(frozen=True)
class ShotRecord:
    """
    Outcome counts of a finite number of measurement shots.
    """

    shots: int
    counts: Mapping[int, int]
    seed: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise StateError(f"Shot count must be positive, got {self.shots}")
        if any(c < 0 for c in self.counts.values()):
            raise StateError("Shot counts cannot be negative")
        if sum(self.counts.values()) != self.shots:
            raise StateError(
                f"Counts sum to {sum(self.counts.values())}, expected {self.shots}"
            )

    def count(self, outcome: int) -> int:
        return self.counts.get(outcome, 0)

    def frequency(self, outcome: int) -> float:
        return self.count(outcome) / self.shots


# ---------------------------------------------------------------------------
# Protocol outputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolTranscript:
    """
    Everything both parties hold after one protocol run.

    `bob_bits` are Bob's measured outcomes (K_m); `sifted_key` holds the
    decoded bits Bob keeps at the conclusive positions (F_k). `scores`
    are exact pre-sampling probabilities of outcome 1. `angles` is only
    filled by the QRL protocols, as (theta1, theta2_final) per bit.
    """

    alice_bits: BitString
    alice_bases: Optional[BasisString]
    bob_bases: BasisString
    bob_bits: BitString
    conclusive_mask: Tuple[bool, ...]
    sifted_key: Tuple[int, ...]
    scores: Tuple[float, ...]
    seed: int
    angles: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self) -> None:
        n = len(self.alice_bits)
        object.__setattr__(self, "conclusive_mask", tuple(bool(m) for m in self.conclusive_mask))
        object.__setattr__(self, "sifted_key", tuple(int(b) for b in self.sifted_key))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        lengths = {
            "bob_bases": len(self.bob_bases),
            "bob_bits": len(self.bob_bits),
            "conclusive_mask": len(self.conclusive_mask),
            "scores": len(self.scores),
        }
        if self.alice_bases is not None:
            lengths["alice_bases"] = len(self.alice_bases)
        if self.angles is not None:
            lengths["angles"] = len(self.angles)
        mismatched = {name: size for name, size in lengths.items() if size != n}
        if mismatched:
            raise ProtocolError(f"Transcript lists must all have length {n}, got {mismatched}")
        if len(self.sifted_key) != sum(self.conclusive_mask):
            raise ProtocolError(
                f"Sifted key has {len(self.sifted_key)} bits but "
                f"{sum(self.conclusive_mask)} positions are conclusive"
            )
        if any(s < 0.0 or s > 1.0 for s in self.scores):
            raise ProtocolError("Scores must lie in [0, 1]")

    @property
    def n(self) -> int:
        return len(self.alice_bits)

    @property
    def alice_sifted(self) -> Tuple[int, ...]:
        """Alice's bits at the conclusive positions."""
        return tuple(b for b, keep in zip(self.alice_bits, self.conclusive_mask) if keep)

    @property
    def sift_fraction(self) -> float:
        return len(self.sifted_key) / self.n


@dataclass(frozen=True)
class QberReport:
    """
    Result of the parameter-estimation step.
    """

    qber: float
    checked_bits: int
    aborted: bool
    threshold: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.qber <= 1.0:
            raise ProtocolError(f"QBER must lie in [0, 1], got {self.qber}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ProtocolError(f"Threshold must lie in [0, 1], got {self.threshold}")
        if self.checked_bits < 1:
            raise ProtocolError("QBER needs at least one checked bit")
        if self.aborted != (self.qber > self.threshold):
            raise ProtocolError("aborted must equal qber > threshold")


# ---------------------------------------------------------------------------
# QRL search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngleInterval:
    """
    Search bracket n1 <= n2 <= n3 inside [0, pi].
    """

    n1: float
    n2: float
    n3: float

    def __post_init__(self) -> None:
        tol = PROBABILITY_TOLERANCE
        if not (-tol <= self.n1 <= self.n2 + tol and self.n2 <= self.n3 + tol and self.n3 <= math.pi + tol):
            raise LearningError(
                f"Interval must satisfy 0 <= n1 <= n2 <= n3 <= pi, got "
                f"({self.n1}, {self.n2}, {self.n3})"
            )

    @classmethod
    def initial(cls, n2: float = math.pi / 2) -> "AngleInterval":
        return cls(0.0, n2, math.pi)

    @property
    def width(self) -> float:
        return self.n3 - self.n1


@dataclass(frozen=True)
class EpisodeRecord:
    """
    One learner episode: the retained candidate and the bracket after
    the update.
    """

    episode: int
    n1: float
    n2: float
    n3: float
    theta2: float
    delta_theta: float
    p0: float
    p1: float
    reward: float
    distance_to_target: float


@dataclass(frozen=True)
class EpisodeLog:
    records: Tuple[EpisodeRecord, ...] = ()
    convergence_iteration: Optional[int] = None

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class QrlRunResult:
    """
    Outcome of learning the decoding angle for one key bit.
    """

    theta1: float
    theta2_final: float
    decoded_bit: int
    true_bit: int
    episode_log: EpisodeLog
    score: float = 0.5
    q_table: Mapping[float, float] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.episode_log.convergence_iteration is not None

    @property
    def delta_theta(self) -> float:
        return self.theta1 - self.theta2_final


# ---------------------------------------------------------------------------
# PQC
# ---------------------------------------------------------------------------

TWO_PI = 2.0 * math.pi


def _wrap_angle(theta: float) -> float:
    # tiny negatives round up to exactly 2pi under %
    wrapped = float(theta) % TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


@dataclass(frozen=True)
class PqcParams:
    """
    Trainable angles of the parameterized circuit, stored in [0, 2pi).
    """

    thetas: Tuple[float, ...]
    ansatz: Ansatz = Ansatz.SINGLE
    layers: int = 1

    def __post_init__(self) -> None:
        ansatz = Ansatz(self.ansatz)
        if self.layers < 1:
            raise LearningError(f"PQC needs at least one layer, got {self.layers}")
        expected = ansatz.parameter_count(self.layers)
        if len(self.thetas) != expected:
            raise LearningError(
                f"Ansatz {ansatz.value!r} with {self.layers} layer(s) takes "
                f"{expected} angles, got {len(self.thetas)}"
            )
        if any(not math.isfinite(t) for t in self.thetas):
            raise LearningError("PQC angles must be finite")
        object.__setattr__(self, "ansatz", ansatz)
        object.__setattr__(self, "thetas", tuple(_wrap_angle(t) for t in self.thetas))

    @classmethod
    def zeros(cls, ansatz: Ansatz = Ansatz.SINGLE, layers: int = 1) -> "PqcParams":
        return cls(tuple(0.0 for _ in range(Ansatz(ansatz).parameter_count(layers))), ansatz, layers)

    def with_thetas(self, thetas: Sequence[float]) -> "PqcParams":
        return PqcParams(tuple(thetas), self.ansatz, self.layers)

    @property
    def dimension(self) -> int:
        return len(self.thetas)

    def inverse(self) -> "PqcParams":
        """
        Angles whose circuit is the adjoint of this one (single ansatz only).
        """
        if self.ansatz is not Ansatz.SINGLE:
            raise LearningError("Only the single-qubit ansatz has an inverse of the same form")
        layers = [self.thetas[3 * i: 3 * i + 3] for i in range(self.layers)]
        inverted = [(-c, -b, -a) for a, b, c in reversed(layers)]
        return self.with_thetas([t for layer in inverted for t in layer])
