"""
B92 with the two non-orthogonal states |0> (bit 0) and |+> (bit 1).

Bob measures in a random basis. Which outcomes are conclusive depends
on the mode:

  standard  Z outcome 1 -> bit 1, X outcome |-> -> bit 0
  literal   Z outcome 0 -> bit 0, X outcome |-> -> bit 1

In standard mode Bob's bit at every position is his best guess: the Z
outcome itself, the inverted X outcome. Conclusive positions are the
ones where the guess is certain, and scores are P(guess = 1). Literal
mode, and any run with a PQC (trained to read the bit directly), keeps
the raw outcome and P(outcome 1).

With `sift_on_bit_basis` the conclusive mask is instead the literal
"Alice's bit equals Bob's basis bit" rule, keeping the raw outcome.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ..learning.pqc import apply_pqc, with_context
from ..quantum.gates import H
from ..quantum.noise import KrausChannel, apply_channel
from ..quantum.state import DensityMatrix, apply_gate, readout
from ..utils.seeding import draw_seeds, make_rng
from ..value_objects import (
    Ansatz,
    B92Mode,
    Basis,
    BasisString,
    BitString,
    PqcParams,
    ProtocolName,
    ProtocolTranscript,
)
from .base import KeyProtocol, check_bit_count, intercept_resend, rotate_into


def b92_state(bit: int) -> DensityMatrix:
    """0 -> |0>, 1 -> |+>."""
    state = DensityMatrix.from_bits([0])
    return apply_gate(state, H) if bit else state


def b92_overlap() -> float:
    """|<psi0|psi1>|^2 = Tr(rho0 rho1) for the two pure B92 states."""
    return float(np.real(np.trace(b92_state(0).matrix @ b92_state(1).matrix)))


def b92_bob_state(
    bit: int,
    bob_basis: Basis,
    channel: Optional[KrausChannel] = None,
    eve_basis: Optional[Basis] = None,
    eve_seed: int = 0,
) -> DensityMatrix:
    """
    Single-qubit state Bob holds after his basis change, before any PQC.
    """
    state = b92_state(bit)
    if eve_basis is not None:
        state = intercept_resend(state, eve_basis, eve_seed)
    state = apply_channel(state, channel)
    return rotate_into(state, bob_basis)


def b92_decode(outcome: int, bob_basis: Basis, mode: B92Mode) -> Tuple[bool, int]:
    """
    (conclusive, decoded bit) for one raw outcome.
    """
    rectilinear = Basis(bob_basis) is Basis.RECTILINEAR
    if B92Mode(mode) is B92Mode.STANDARD:
        return outcome == 1, 1 if rectilinear else 0
    if rectilinear:
        return outcome == 0, 0
    return outcome == 1, 1


def b92_guess(outcome: int, bob_basis: Basis) -> int:
    """Likelier bit for a raw outcome: Z outcomes as is, X outcomes inverted."""
    return outcome if Basis(bob_basis) is Basis.RECTILINEAR else 1 - outcome


class B92Protocol(KeyProtocol):
    """
    Two-state protocol; inconclusive positions are discarded.
    """

    def __init__(
        self,
        channel: Optional[KrausChannel] = None,
        shots: int = 1024,
        mode: B92Mode = B92Mode.STANDARD,
        eve: bool = False,
        pqc: Optional[PqcParams] = None,
        sift_on_bit_basis: bool = False,
        name: ProtocolName = ProtocolName.B92) -> None:

        super().__init__(name, channel, shots)
        self._mode = B92Mode(mode)
        self._eve = eve
        self._pqc = pqc
        self._sift_on_bit_basis = sift_on_bit_basis
        self._guesses = self._mode is B92Mode.STANDARD and not sift_on_bit_basis and pqc is None

    @property
    def mode(self) -> B92Mode:
        return self._mode

    def run(self, n: int, seed: int) -> ProtocolTranscript:
        check_bit_count(n)
        rng = make_rng(seed)
        bits = rng.integers(0, 2, size=n)
        bob_bases = BasisString.from_bits(rng.integers(0, 2, size=n))
        eve_bases = BasisString.from_bits(rng.integers(0, 2, size=n))
        eve_seeds = draw_seeds(rng, n)
        shot_seeds = draw_seeds(rng, n)

        bob_bits, scores, mask, sifted = [], [], [], []
        for i in range(n):
            state = b92_bob_state(
                int(bits[i]),
                bob_bases[i],
                self._channel,
                eve_bases[i] if self._eve else None,
                eve_seeds[i],
            )
            if self._pqc is not None:
                if self._pqc.ansatz is Ansatz.BASIS_AWARE:
                    state = with_context(state, bob_bases[i].bit)
                state = apply_pqc(state, self._pqc)
            score, outcome = readout(state, self._shots, shot_seeds[i])
            if self._guesses and bob_bases[i] is Basis.DIAGONAL:
                score = 1.0 - score
            scores.append(score)
            bob_bits.append(b92_guess(outcome, bob_bases[i]) if self._guesses else outcome)

            if self._sift_on_bit_basis:
                keep, key_bit = int(bits[i]) == bob_bases[i].bit, outcome
            else:
                keep, key_bit = b92_decode(outcome, bob_bases[i], self._mode)
            mask.append(keep)
            if keep:
                sifted.append(key_bit)

        return ProtocolTranscript(
            alice_bits=BitString(tuple(bits)),
            alice_bases=None,
            bob_bases=bob_bases,
            bob_bits=BitString(tuple(bob_bits)),
            conclusive_mask=tuple(mask),
            sifted_key=tuple(sifted),
            scores=tuple(scores),
            seed=seed,
        )


def b92_run(
    n: int,
    channel: Optional[KrausChannel] = None,
    shots: int = 1024,
    seed: int = 0,
    mode: B92Mode = B92Mode.STANDARD,
    eve: bool = False,
    pqc: Optional[PqcParams] = None,
) -> ProtocolTranscript:
    return B92Protocol(channel=channel, shots=shots, mode=mode, eve=eve, pqc=pqc).run(n, seed)
