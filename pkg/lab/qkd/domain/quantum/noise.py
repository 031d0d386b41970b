"""
Single-qubit noise channels as Kraus operator sets.

Standard forms:
  bit-flip        {sqrt(1-p) I, sqrt(p) X}
  phase-flip      {sqrt(1-p) I, sqrt(p) Z}
  bit-phase-flip  {sqrt(1-p) I, sqrt(p) Y}
  depolarizing    {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}
  amplitude       K0 = [[1, 0], [0, sqrt(1-g)]], K1 = [[0, sqrt(g)], [0, 0]]
  phase damping   K0 = [[1, 0], [0, sqrt(1-l)]], K1 = [[0, 0], [0, sqrt(l)]]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..exceptions import ChannelError
from ..value_objects import ChannelKind
from .gates import I2, X, Y, Z
from .state import DensityMatrix, apply_kraus


COMPLETENESS_TOLERANCE = 1e-12


def _bit_flip(p: float) -> list[np.ndarray]:
    return [np.sqrt(1 - p) * I2, np.sqrt(p) * X]


def _phase_flip(p: float) -> list[np.ndarray]:
    return [np.sqrt(1 - p) * I2, np.sqrt(p) * Z]


def _bit_phase_flip(p: float) -> list[np.ndarray]:
    return [np.sqrt(1 - p) * I2, np.sqrt(p) * Y]


def _depolarizing(p: float) -> list[np.ndarray]:
    return [
        np.sqrt(1 - 3 * p / 4) * I2,
        np.sqrt(p / 4) * X,
        np.sqrt(p / 4) * Y,
        np.sqrt(p / 4) * Z,
    ]


def _amplitude_damping(gamma: float) -> list[np.ndarray]:
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return [k0, k1]


def _phase_damping(lam: float) -> list[np.ndarray]:
    k0 = np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=np.complex128)
    k1 = np.array([[0, 0], [0, np.sqrt(lam)]], dtype=np.complex128)
    return [k0, k1]


_KRAUS_BUILDERS: dict[ChannelKind, Callable[[float], list[np.ndarray]]] = {
    ChannelKind.BIT_FLIP: _bit_flip,
    ChannelKind.PHASE_FLIP: _phase_flip,
    ChannelKind.BIT_PHASE_FLIP: _bit_phase_flip,
    ChannelKind.DEPOLARIZING: _depolarizing,
    ChannelKind.AMPLITUDE_DAMPING: _amplitude_damping,
    ChannelKind.PHASE_DAMPING: _phase_damping,
}


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """
    One noise process at one strength.
    """

    kind: ChannelKind
    strength: float
    operators: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not 0.0 <= self.strength <= 1.0:
            raise ChannelError(f"Channel strength must lie in [0, 1], got {self.strength}")
        ops = []
        for op in self.operators:
            op = np.array(op, dtype=np.complex128)
            if op.shape != (2, 2):
                raise ChannelError(f"Kraus operators must be 2x2, got {op.shape}")
            op.setflags(write=False)
            ops.append(op)
        if not ops:
            raise ChannelError("A channel needs at least one Kraus operator")
        total = sum(op.conj().T @ op for op in ops)
        if np.max(np.abs(total - np.eye(2))) > COMPLETENESS_TOLERANCE:
            raise ChannelError(f"Kraus operators of {self.kind} are not complete")
        object.__setattr__(self, "operators", tuple(ops))

    def completeness_error(self) -> float:
        total = sum(op.conj().T @ op for op in self.operators)
        return float(np.max(np.abs(total - np.eye(2))))

    def __repr__(self) -> str:
        return f"KrausChannel(kind={self.kind.value!r}, strength={self.strength})"


def build_channel(kind: ChannelKind | str, strength: float) -> KrausChannel:
    """
    Kraus channel of `kind` at `strength`; strength 0 is the identity.
    """
    try:
        kind = ChannelKind(kind)
    except ValueError:
        raise ChannelError(
            f"Unsupported channel kind: {kind!r}. "
            f"Supported: {[k.value for k in ChannelKind]}"
        )
    strength = float(strength)
    if not 0.0 <= strength <= 1.0:
        raise ChannelError(f"Channel strength must lie in [0, 1], got {strength}")
    return KrausChannel(kind=kind, strength=strength, operators=tuple(_KRAUS_BUILDERS[kind](strength)))


def apply_channel(state: DensityMatrix, channel: Optional[KrausChannel], target: int = 0) -> DensityMatrix:
    """
    rho -> sum_k K_k rho K_k^dagger on `target`; `None` is the ideal channel.
    """
    if channel is None:
        return state
    if target < 0 or target >= state.num_qubits:
        raise ChannelError(f"Target qubit {target} out of range for {state.num_qubits} qubit(s)")
    return apply_kraus(state, channel.operators, target)
