from abc import ABC, abstractmethod
from typing import Optional

from ..exceptions import ProtocolError
from ..quantum.gates import H
from ..quantum.noise import KrausChannel
from ..quantum.state import DensityMatrix, apply_gate, readout
from ..value_objects import Basis, ProtocolName, ProtocolTranscript


def prepare(bit: int, basis: Basis) -> DensityMatrix:
    """
    Basis eigenstate: rectilinear 0/1 -> |0>/|1>, diagonal 0/1 -> |+>/|->.
    """
    state = DensityMatrix.from_bits([bit])
    if Basis(basis) is Basis.DIAGONAL:
        state = apply_gate(state, H)
    return state


def rotate_into(state: DensityMatrix, basis: Basis) -> DensityMatrix:
    """Basis change so a computational measurement reads out `basis`."""
    if Basis(basis) is Basis.DIAGONAL:
        return apply_gate(state, H)
    return state


def intercept_resend(state: DensityMatrix, basis: Basis, seed: int) -> DensityMatrix:
    """
    Eve measures once in `basis` and forwards the eigenstate she saw.
    """
    _, outcome = readout(rotate_into(state, basis), shots=1, seed=seed)
    return prepare(outcome, basis)


def check_bit_count(n: int) -> None:
    if n < 1:
        raise ProtocolError(f"Protocol needs at least one bit, got n={n}")


class KeyProtocol(ABC):
    """
    Base class for every key agreement protocol.

    A protocol is configured once (channel, shots, decoder options)
    and then produces independent transcripts from (n, seed).
    """

    def __init__(
        self,
        name: ProtocolName,
        channel: Optional[KrausChannel] = None,
        shots: int = 1024) -> None:

        if shots < 1:
            raise ProtocolError(f"shots must be >= 1, got {shots}")
        self._name = ProtocolName(name)
        self._channel = channel
        self._shots = shots

    @property
    def name(self) -> ProtocolName:
        return self._name

    @property
    def label(self) -> str:
        return self._name.label

    @property
    def channel(self) -> Optional[KrausChannel]:
        return self._channel

    @property
    def shots(self) -> int:
        return self._shots

    @abstractmethod
    def run(self, n: int, seed: int) -> ProtocolTranscript:
        """
        Produce a transcript of `n` transmitted bits.
        """
        pass
