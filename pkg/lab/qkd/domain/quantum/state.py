"""
Density-matrix simulation of one or two qubits.

All states are immutable DensityMatrix values; every operation returns
a new validated state. Pure inputs are embedded as rank-1 matrices so
noiseless and noisy runs share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import StateError
from ..value_objects import MeasurementDistribution, ShotRecord


STATE_TOLERANCE = 1e-12
_SUPPORTED_DIMS = (2, 4)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, unit-trace, positive semidefinite 2x2 or 4x4 matrix.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        rho = np.array(self.matrix, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in _SUPPORTED_DIMS:
            raise StateError(f"Density matrix must be 2x2 or 4x4, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise StateError("Density matrix has non-finite entries")
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOLERANCE:
            raise StateError("Density matrix is not Hermitian")
        trace = np.trace(rho)
        if abs(trace - 1.0) > STATE_TOLERANCE:
            raise StateError(f"Density matrix trace must be 1, got {trace!r}")
        if np.min(np.linalg.eigvalsh(rho)) < -STATE_TOLERANCE:
            raise StateError("Density matrix has negative eigenvalues")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "DensityMatrix":
        """Computational basis state |b0 b1...>."""
        if len(bits) not in (1, 2):
            raise StateError(f"Only 1 or 2 qubits are supported, got {len(bits)}")
        index = 0
        for b in bits:
            if b not in (0, 1):
                raise StateError(f"Basis state bits must be 0/1, got {list(bits)}")
            index = 2 * index + int(b)
        rho = np.zeros((2 ** len(bits),) * 2, dtype=np.complex128)
        rho[index, index] = 1.0
        return cls(rho)

    @classmethod
    def from_statevector(cls, vector: Sequence[complex]) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise StateError("State vector cannot be zero")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, num_qubits: int = 1) -> "DensityMatrix":
        dim = 2 ** num_qubits
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return 1 if self.dim == 2 else 2

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        """Product state with `other` appended as the higher qubit indices."""
        if self.num_qubits + other.num_qubits > 2:
            raise StateError("Only 1 or 2 qubits are supported")
        return DensityMatrix(np.kron(self.matrix, other.matrix))

    def allclose(self, other: "DensityMatrix", atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, atol=atol))


# ---------------------------------------------------------------------------
# Operator embedding
# ---------------------------------------------------------------------------

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def embed_operator(operator: np.ndarray, targets: Tuple[int, ...], num_qubits: int) -> np.ndarray:
    """
    Lift a 1- or 2-qubit operator acting on `targets` to the full register.
    """
    operator = np.asarray(operator, dtype=np.complex128)
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise StateError(f"Targets must be distinct, got {targets}")
    if any(t < 0 or t >= num_qubits for t in targets):
        raise StateError(f"Targets {targets} out of range for {num_qubits} qubit(s)")
    if operator.shape != (2 ** len(targets),) * 2:
        raise StateError(
            f"Operator of shape {operator.shape} does not match {len(targets)} target(s)"
        )
    if len(targets) == num_qubits:
        if targets == (1, 0):
            return _SWAP @ operator @ _SWAP
        return operator
    identity = np.eye(2, dtype=np.complex128)
    return np.kron(operator, identity) if targets[0] == 0 else np.kron(identity, operator)


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def apply_gate(state: DensityMatrix, gate: np.ndarray, targets: Sequence[int] = (0,)) -> DensityMatrix:
    """
    rho -> U rho U^dagger with U acting on `targets`.
    """
    full = embed_operator(gate, tuple(targets), state.num_qubits)
    return DensityMatrix(_hermitize(full @ state.matrix @ full.conj().T))


def apply_kraus(state: DensityMatrix, operators: Sequence[np.ndarray], target: int = 0) -> DensityMatrix:
    """
    rho -> sum_k K_k rho K_k^dagger with every K_k acting on `target`.
    """
    rho = np.zeros_like(state.matrix)
    for op in operators:
        full = embed_operator(op, (target,), state.num_qubits)
        rho = rho + full @ state.matrix @ full.conj().T
    return DensityMatrix(_hermitize(rho))


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def measure_distribution(state: DensityMatrix) -> MeasurementDistribution:
    """
    Computational-basis outcome probabilities: the real diagonal of rho.
    """
    return MeasurementDistribution(tuple(np.real(np.diag(state.matrix))))


def marginal(dist: MeasurementDistribution, qubit: int = 0) -> MeasurementDistribution:
    """
    Outcome probabilities of a single qubit of a 1- or 2-qubit distribution.
    """
    probs = np.asarray(dist.probabilities)
    if len(probs) == 2:
        if qubit != 0:
            raise StateError(f"Qubit {qubit} out of range for 1 qubit")
        return dist
    if qubit not in (0, 1):
        raise StateError(f"Qubit {qubit} out of range for 2 qubits")
    grid = probs.reshape(2, 2)
    reduced = grid.sum(axis=1) if qubit == 0 else grid.sum(axis=0)
    return MeasurementDistribution(tuple(reduced))


def sample_shots(dist: MeasurementDistribution, shots: int, seed: int) -> ShotRecord:
    """
    Draw `shots` outcomes from `dist`; identical seeds give identical counts.
    """
    if shots < 1:
        raise StateError(f"Shot count must be positive, got {shots}")
    probs = np.asarray(dist.probabilities, dtype=np.float64)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return ShotRecord(
        shots=shots,
        counts={outcome: int(c) for outcome, c in enumerate(counts) if c > 0},
        seed=int(seed),
    )


def majority_bit(record: ShotRecord) -> int:
    """
    Majority outcome of a single-qubit record; ties go to the parity of
    the record's seed.
    """
    zeros, ones = record.count(0), record.count(1)
    if ones > zeros:
        return 1
    if zeros > ones:
        return 0
    return record.seed & 1


def readout(state: DensityMatrix, shots: int, seed: int, qubit: int = 0) -> Tuple[float, int]:
    """
    Score and decided bit of one qubit: the exact probability of outcome 1
    and the majority outcome over `shots` samples.
    """
    dist = marginal(measure_distribution(state), qubit)
    record = sample_shots(dist, shots, seed)
    return dist[1], majority_bit(record)
