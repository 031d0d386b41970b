"""
BB84 with random bases, optional intercept-resend eavesdropper and an
optional PQC inserted right before Bob's measurement.
"""

from __future__ import annotations

from typing import Optional

from ..learning.pqc import apply_pqc, with_context
from ..quantum.noise import KrausChannel, apply_channel
from ..quantum.state import DensityMatrix, readout
from ..utils.seeding import draw_seeds, make_rng
from ..value_objects import (
    Ansatz,
    Basis,
    BasisString,
    BitString,
    PqcParams,
    ProtocolName,
    ProtocolTranscript,
)
from .base import KeyProtocol, check_bit_count, intercept_resend, prepare, rotate_into


def bb84_bob_state(
    bit: int,
    alice_basis: Basis,
    bob_basis: Basis,
    channel: Optional[KrausChannel] = None,
    eve_basis: Optional[Basis] = None,
    eve_seed: int = 0,
) -> DensityMatrix:
    """
    Single-qubit state Bob holds after his basis change, before any PQC.
    """
    state = prepare(bit, alice_basis)
    if eve_basis is not None:
        state = intercept_resend(state, eve_basis, eve_seed)
    state = apply_channel(state, channel)
    return rotate_into(state, bob_basis)


def bb84_pqc_input(state: DensityMatrix, alice_basis: Basis, bob_basis: Basis, pqc: PqcParams) -> DensityMatrix:
    """
    Attach the basis-relation ancilla when the ansatz needs it.
    """
    if pqc.ansatz is Ansatz.BASIS_AWARE:
        return with_context(state, Basis(alice_basis).bit ^ Basis(bob_basis).bit)
    return state


class BB84Protocol(KeyProtocol):
    """
    Alice: rectilinear 0->|0>, 1->|1>; diagonal 0->|+>, 1->|->.
    Bob measures in a uniformly random basis and keeps the majority
    outcome over `shots`; matched bases are conclusive.
    """

    def __init__(
        self,
        channel: Optional[KrausChannel] = None,
        eve: bool = False,
        shots: int = 1024,
        pqc: Optional[PqcParams] = None,
        name: ProtocolName = ProtocolName.BB84) -> None:

        super().__init__(name, channel, shots)
        self._eve = eve
        self._pqc = pqc

    @property
    def eve(self) -> bool:
        return self._eve

    def run(self, n: int, seed: int) -> ProtocolTranscript:
        check_bit_count(n)
        rng = make_rng(seed)
        bits = rng.integers(0, 2, size=n)
        alice_bases = BasisString.from_bits(rng.integers(0, 2, size=n))
        bob_bases = BasisString.from_bits(rng.integers(0, 2, size=n))
        eve_bases = BasisString.from_bits(rng.integers(0, 2, size=n))
        eve_seeds = draw_seeds(rng, n)
        shot_seeds = draw_seeds(rng, n)

        bob_bits, scores = [], []
        for i in range(n):
            state = bb84_bob_state(
                int(bits[i]),
                alice_bases[i],
                bob_bases[i],
                self._channel,
                eve_bases[i] if self._eve else None,
                eve_seeds[i],
            )
            if self._pqc is not None:
                state = apply_pqc(bb84_pqc_input(state, alice_bases[i], bob_bases[i], self._pqc), self._pqc)
            score, outcome = readout(state, self._shots, shot_seeds[i])
            scores.append(score)
            bob_bits.append(outcome)

        mask = tuple(a is b for a, b in zip(alice_bases, bob_bases))
        return ProtocolTranscript(
            alice_bits=BitString(tuple(bits)),
            alice_bases=alice_bases,
            bob_bases=bob_bases,
            bob_bits=BitString(tuple(bob_bits)),
            conclusive_mask=mask,
            sifted_key=tuple(b for b, keep in zip(bob_bits, mask) if keep),
            scores=tuple(scores),
            seed=seed,
        )


def bb84_run(
    n: int,
    channel: Optional[KrausChannel] = None,
    eve: bool = False,
    shots: int = 1024,
    seed: int = 0,
    pqc: Optional[PqcParams] = None,
) -> ProtocolTranscript:
    return BB84Protocol(channel=channel, eve=eve, shots=shots, pqc=pqc).run(n, seed)
