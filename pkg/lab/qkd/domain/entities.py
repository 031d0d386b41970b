"""
Domain entities for experiment and training configuration.

These classes are framework-agnostic; they should not import anything
from infrastructure or third-party optimizer / metrics libraries.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .exceptions import ConfigError, LearningError
from .value_objects import (
    Ansatz,
    B92Mode,
    ChannelKind,
    EvalMode,
    OptimizerKind,
    ProtocolName,
    QberDefinition,
    QrlVersion,
)


DEFAULT_GRID: Tuple[float, ...] = tuple(round(0.1 * i, 1) for i in range(11))


@dataclass(frozen=True)
class TrainingConfig:
    """
    Hyperparameters of PQC training and of the QNN-integrated runs.
    """

    optimizer: OptimizerKind = OptimizerKind.DERIVATIVE_FREE
    learning_rate: float = 0.5
    max_iterations: int = 100
    rounds: int = 5
    samples: int = 10
    key_bits: int = 100
    inner_iterations: int = 1
    shots: int = 1024
    ansatz: Optional[Ansatz] = None
    layers: int = 1
    train: bool = True
    min_improvement: float = 1e-3
    seed: int = 7

    def __post_init__(self) -> None:
        object.__setattr__(self, "optimizer", OptimizerKind(self.optimizer))
        if self.ansatz is not None:
            object.__setattr__(self, "ansatz", Ansatz(self.ansatz))
        counts = {
            "max_iterations": self.max_iterations,
            "rounds": self.rounds,
            "samples": self.samples,
            "key_bits": self.key_bits,
            "inner_iterations": self.inner_iterations,
            "shots": self.shots,
            "layers": self.layers,
        }
        bad = {name: value for name, value in counts.items() if value < 1}
        if bad:
            raise LearningError(f"Training counts must be >= 1, got {bad}")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise LearningError(f"Learning rate must be positive, got {self.learning_rate}")
        if not (self.min_improvement >= 0 and math.isfinite(self.min_improvement)):
            raise LearningError(f"min_improvement must be >= 0, got {self.min_improvement}")


@dataclass(frozen=True)
class QrlConfig:
    """
    Parameters of the QRL angle search.

    `max_episodes=None` selects the per-version default budget.
    """

    max_episodes: Optional[int] = None
    epsilon: float = 0.01
    target: float = 1.2
    shots: int = 1024
    mode: EvalMode = EvalMode.EXACT

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", EvalMode(self.mode))
        if self.max_episodes is not None and self.max_episodes < 1:
            raise LearningError(f"max_episodes must be >= 1, got {self.max_episodes}")
        if not self.epsilon > 0:
            raise LearningError(f"epsilon must be positive, got {self.epsilon}")
        if self.shots < 1:
            raise LearningError(f"shots must be >= 1, got {self.shots}")

    def budget(self, version: QrlVersion) -> int:
        if self.max_episodes is not None:
            return self.max_episodes
        return 1000 if QrlVersion(version) is QrlVersion.V1 else 100


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Resolved configuration of one CLI invocation.

    `b92_mode=None` means the protocol default: standard for B92 and
    literal for QNN-B92.
    """

    protocol: ProtocolName = ProtocolName.BB84
    n_bits: int = 100
    samples: int = 10
    shots: int = 1024
    channel: Optional[ChannelKind] = None
    strength: float = 0.0
    kinds: Tuple[ChannelKind, ...] = tuple(ChannelKind)
    grid: Tuple[float, ...] = DEFAULT_GRID
    eve: bool = False
    threshold: float = 0.11
    sample_fraction: float = 0.5
    b92_mode: Optional[B92Mode] = None
    qber_def: QberDefinition = QberDefinition.SIFTED
    training: TrainingConfig = field(default_factory=TrainingConfig)
    qrl: QrlConfig = field(default_factory=QrlConfig)
    trials: int = 10
    workers: int = 4
    seed: int = 7
    out: Path = Path("results")

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "protocol", ProtocolName(self.protocol))
            if self.channel is not None:
                object.__setattr__(self, "channel", ChannelKind(self.channel))
            object.__setattr__(self, "kinds", tuple(ChannelKind(k) for k in self.kinds))
            if self.b92_mode is not None:
                object.__setattr__(self, "b92_mode", B92Mode(self.b92_mode))
            object.__setattr__(self, "qber_def", QberDefinition(self.qber_def))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "grid", tuple(float(s) for s in self.grid))
        object.__setattr__(self, "out", Path(self.out))

        counts = {
            "n_bits": self.n_bits,
            "samples": self.samples,
            "shots": self.shots,
            "trials": self.trials,
            "workers": self.workers,
        }
        bad = {name: value for name, value in counts.items() if value < 1}
        if bad:
            raise ConfigError(f"Counts must be >= 1, got {bad}")
        if not 0.0 <= self.strength <= 1.0:
            raise ConfigError(f"Channel strength must lie in [0, 1], got {self.strength}")
        if not self.grid:
            raise ConfigError("Sweep grid cannot be empty")
        if any(not 0.0 <= s <= 1.0 for s in self.grid):
            raise ConfigError(f"Sweep grid strengths must lie in [0, 1], got {self.grid}")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError(f"Sweep grid must be strictly increasing, got {self.grid}")
        if not self.kinds:
            raise ConfigError("Sweep needs at least one channel kind")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"Abort threshold must lie in [0, 1], got {self.threshold}")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ConfigError(f"sample_fraction must lie in (0, 1], got {self.sample_fraction}")

    @property
    def resolved_b92_mode(self) -> B92Mode:
        if self.b92_mode is not None:
            return self.b92_mode
        return B92Mode.LITERAL if self.protocol is ProtocolName.QNN_B92 else B92Mode.STANDARD

    def to_dict(self) -> Dict[str, Any]:
        """Plain JSON-ready form; enums by value, paths as POSIX strings."""
        return _plain(self)

    def fingerprint(self) -> str:
        """
        16 hex chars of blake2b over the sorted-key JSON form, with the
        output directory left out.
        """
        body = self.to_dict()
        body.pop("out", None)
        return fingerprint_of(body)


def fingerprint_of(body: Any) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.blake2b(canonical.encode(), digest_size=8).hexdigest()


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return value.as_posix()
    if dataclasses.is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value
