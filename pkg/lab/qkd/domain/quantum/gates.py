"""
Gate library.

Qubit 0 is the most significant bit of an outcome index; multi-qubit
operators are built with numpy.kron in that order. Rotations follow
R(theta) = exp(-i theta/2 * Pauli) and the phase gate is
P(theta) = diag(1, e^{i theta}).
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from ..exceptions import GateError


UNITARY_TOLERANCE = 1e-12


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=np.complex128)
    matrix.setflags(write=False)
    return matrix


_SQRT1_2 = 1.0 / np.sqrt(2.0)

I2 = _frozen(np.eye(2))
X = _frozen([[0, 1], [1, 0]])
Y = _frozen([[0, -1j], [1j, 0]])
Z = _frozen([[1, 0], [0, -1]])
H = _frozen(np.array([[1, 1], [1, -1]]) * _SQRT1_2)
# control is the first target, target the second
CNOT = _frozen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def _phase(theta: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=np.complex128)


def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128
    )


_FIXED_GATES: dict[str, np.ndarray] = {
    "I": I2,
    "X": X,
    "Y": Y,
    "Z": Z,
    "H": H,
    "CNOT": CNOT,
}

_PARAMETRIC_GATES: dict[str, Callable[[float], np.ndarray]] = {
    "P": _phase,
    "RX": _rx,
    "RY": _ry,
    "RZ": _rz,
}


def make_gate(name: str, angle: Optional[float] = None) -> np.ndarray:
    """
    Build a read-only unitary for `name`.

    Parametric gates (P, RX, RY, RZ) require `angle`; fixed gates
    reject it.
    """
    key = name.strip().upper()
    if key in _FIXED_GATES:
        if angle is not None:
            raise GateError(f"Gate {key} takes no angle, got {angle!r}")
        return _FIXED_GATES[key]
    if key in _PARAMETRIC_GATES:
        if angle is None:
            raise GateError(f"Gate {key} requires an angle")
        if not np.isfinite(angle):
            raise GateError(f"Gate {key} angle must be finite, got {angle!r}")
        return _frozen(_PARAMETRIC_GATES[key](float(angle)))
    raise GateError(
        f"Unknown gate: {name!r}. "
        f"Supported: {sorted(list(_FIXED_GATES) + list(_PARAMETRIC_GATES))}"
    )


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOLERANCE) -> bool:
    matrix = np.asarray(matrix)
    identity = np.eye(matrix.shape[0])
    return bool(np.max(np.abs(matrix.conj().T @ matrix - identity)) < tol)


def controlled_ry(theta: float) -> np.ndarray:
    """
    Controlled-Ry on (control, target) = (first, second) qubit, built
    from two CNOTs and two half-angle Ry rotations on the target.
    """
    half_plus = np.kron(I2, make_gate("RY", theta / 2))
    half_minus = np.kron(I2, make_gate("RY", -theta / 2))
    return _frozen(half_plus @ CNOT @ half_minus @ CNOT)
