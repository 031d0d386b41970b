"""
Parameterized quantum circuit (PQC), its MSE loss and the
parameter-shift gradient.

Layer layout: Rz(a) . Ry(b) . Rz(c) on the key qubit (qubit 0), with c
applied first. The basis-aware ansatz adds one controlled-Ry from the
context ancilla (qubit 1) onto the key qubit after the layers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import LearningError
from ..quantum.gates import controlled_ry, make_gate
from ..quantum.state import DensityMatrix, apply_gate
from ..value_objects import Ansatz, PqcParams


SHIFT = np.pi / 2


@dataclass(frozen=True)
class TrainingExample:
    """
    Alice's bit and the state Bob holds right before the PQC.
    """

    bit: int
    state: DensityMatrix

    def __post_init__(self) -> None:
        if self.bit not in (0, 1):
            raise LearningError(f"Training bit must be 0/1, got {self.bit}")


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    loss: float
    thetas: Tuple[float, ...]


@dataclass(frozen=True)
class TrainingTrace:
    """
    Loss history of one optimization; entry 0 is the initial point.
    """

    entries: Tuple[TraceEntry, ...]
    best_loss: float
    best_thetas: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise LearningError("A training trace needs at least one entry")
        if self.best_loss != min(e.loss for e in self.entries):
            raise LearningError("best_loss must equal the minimum loss of the trace")

    @classmethod
    def from_entries(cls, entries: Sequence[TraceEntry]) -> "TrainingTrace":
        entries = tuple(entries)
        best = min(entries, key=lambda e: e.loss)
        return cls(entries=entries, best_loss=best.loss, best_thetas=best.thetas)

    @property
    def initial_loss(self) -> float:
        return self.entries[0].loss

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# Circuit
# ---------------------------------------------------------------------------

def _layer_unitary(a: float, b: float, c: float) -> np.ndarray:
    return make_gate("RZ", a) @ make_gate("RY", b) @ make_gate("RZ", c)


def pqc_unitary(thetas: Sequence[float], ansatz: Ansatz, layers: int) -> np.ndarray:
    """
    Full unitary of the ansatz for raw (not canonicalized) angles.
    """
    ansatz = Ansatz(ansatz)
    expected = ansatz.parameter_count(layers)
    if len(thetas) != expected:
        raise LearningError(f"Ansatz {ansatz.value!r} expects {expected} angles, got {len(thetas)}")
    unitary = np.eye(2, dtype=np.complex128)
    for i in range(layers):
        a, b, c = thetas[3 * i: 3 * i + 3]
        unitary = _layer_unitary(a, b, c) @ unitary
    if ansatz is Ansatz.SINGLE:
        return unitary
    # ancilla (qubit 1) controls, key qubit (qubit 0) is the target
    cry = controlled_ry(thetas[-1])
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)
    return swap @ cry @ swap @ np.kron(unitary, np.eye(2))


def apply_pqc(state: DensityMatrix, params: PqcParams) -> DensityMatrix:
    """
    Apply U(theta) to `state`; the ansatz must match the qubit count.
    """
    if state.num_qubits != params.ansatz.num_qubits:
        raise LearningError(
            f"Ansatz {params.ansatz.value!r} acts on {params.ansatz.num_qubits} qubit(s), "
            f"state has {state.num_qubits}"
        )
    unitary = pqc_unitary(params.thetas, params.ansatz, params.layers)
    return apply_gate(state, unitary, tuple(range(state.num_qubits)))


def with_context(state: DensityMatrix, context_bit: int) -> DensityMatrix:
    """Append the classical context ancilla |c> as qubit 1."""
    return state.tensor(DensityMatrix.from_bits([context_bit]))


# ---------------------------------------------------------------------------
# Loss
# ---------------------------------------------------------------------------

class MseObjective:
    """
    L(theta) = (1/N) sum_i P_i(outcome != bit_i)^2 over a cached batch,
    evaluated with exact probabilities.
    """

    def __init__(self, batch: Sequence[TrainingExample], ansatz: Ansatz, layers: int = 1) -> None:
        if not batch:
            raise LearningError("Loss needs a non-empty batch")
        self.ansatz = Ansatz(ansatz)
        self.layers = layers
        dims = {ex.state.num_qubits for ex in batch}
        if dims != {self.ansatz.num_qubits}:
            raise LearningError(
                f"Ansatz {self.ansatz.value!r} acts on {self.ansatz.num_qubits} qubit(s), "
                f"batch states have {sorted(dims)}"
            )
        self._rhos = np.stack([ex.state.matrix for ex in batch])
        self._bits = np.array([ex.bit for ex in batch], dtype=np.int64)

    def __len__(self) -> int:
        return len(self._bits)

    @property
    def dimension(self) -> int:
        return self.ansatz.parameter_count(self.layers)

    def wrong_probabilities(self, thetas: Sequence[float]) -> np.ndarray:
        unitary = pqc_unitary(list(thetas), self.ansatz, self.layers)
        evolved = unitary @ self._rhos @ unitary.conj().T
        diag = np.real(np.diagonal(evolved, axis1=1, axis2=2))
        if self.ansatz.num_qubits == 2:
            p1 = diag[:, 2] + diag[:, 3]
        else:
            p1 = diag[:, 1]
        p1 = np.clip(p1, 0.0, 1.0)
        return np.where(self._bits == 1, 1.0 - p1, p1)

    def __call__(self, thetas: Sequence[float]) -> float:
        wrong = self.wrong_probabilities(thetas)
        return float(np.mean(wrong ** 2))

    def gradient(self, thetas: Sequence[float]) -> np.ndarray:
        return parameter_shift_gradient(self, thetas)


def loss_mse(params: PqcParams, batch: Sequence[TrainingExample]) -> float:
    """
    Mean squared probability of decoding the wrong bit, in [0, 1].
    """
    return MseObjective(batch, params.ansatz, params.layers)(params.thetas)


def parameter_shift_gradient(objective: MseObjective, thetas: Sequence[float]) -> np.ndarray:
    """
    dL/dtheta_j = (2/N) sum_i p_i * (p_i(theta_j + pi/2) - p_i(theta_j - pi/2)) / 2

    Each probability is a first-order trigonometric function of every
    angle, so the two-term shift is exact.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    wrong = objective.wrong_probabilities(thetas)
    grad = np.zeros_like(thetas)
    for j in range(len(thetas)):
        plus, minus = thetas.copy(), thetas.copy()
        plus[j] += SHIFT
        minus[j] -= SHIFT
        dp = (objective.wrong_probabilities(plus) - objective.wrong_probabilities(minus)) / 2
        grad[j] = 2.0 * np.mean(wrong * dp)
    return grad
