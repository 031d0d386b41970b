import numpy as np
import pytest

from lab.qkd.domain.metrics import qber
from lab.qkd.domain.protocols import B92Protocol, b92_run
from lab.qkd.domain.protocols.b92 import b92_decode, b92_guess, b92_overlap, b92_state
from lab.qkd.domain.quantum.noise import build_channel
from lab.qkd.domain.quantum.state import DensityMatrix
from lab.qkd.domain.value_objects import B92Mode, Basis, ChannelKind


# ============================================================================
# States and decoding
# ============================================================================

def test_states_overlap_one_half():
    """|<0|+>|^2 = 1/2."""
    assert b92_overlap() == pytest.approx(0.5, abs=1e-12)


def test_bit_zero_is_ground_state():
    """Bit 0 is |0>."""
    assert b92_state(0).allclose(DensityMatrix.from_bits([0]))


@pytest.mark.parametrize(
    "outcome, basis, mode, expected",
    [
        (1, Basis.RECTILINEAR, B92Mode.STANDARD, (True, 1)),
        (0, Basis.RECTILINEAR, B92Mode.STANDARD, (False, 1)),
        (1, Basis.DIAGONAL, B92Mode.STANDARD, (True, 0)),
        (0, Basis.RECTILINEAR, B92Mode.LITERAL, (True, 0)),
        (1, Basis.DIAGONAL, B92Mode.LITERAL, (True, 1)),
        (0, Basis.DIAGONAL, B92Mode.LITERAL, (False, 1)),
    ],
)
def test_decode_table(outcome, basis, mode, expected):
    """Conclusive outcomes and their bits per mode."""
    assert b92_decode(outcome, basis, mode) == expected


def test_guess_inverts_diagonal_outcomes():
    """Z outcomes are kept, X outcomes flipped."""
    assert [b92_guess(o, Basis.RECTILINEAR) for o in (0, 1)] == [0, 1]
    assert [b92_guess(o, Basis.DIAGONAL) for o in (0, 1)] == [1, 0]


# ============================================================================
# Protocol runs
# ============================================================================

def test_standard_mode_conclusive_fraction_and_no_errors():
    """A quarter of the positions are conclusive, all of them correct."""
    t = b92_run(10_000, seed=1)
    assert t.sift_fraction == pytest.approx(0.25, abs=0.02)
    assert qber(t.alice_sifted, t.sifted_key) == 0.0


def test_standard_mode_reports_best_guesses():
    """Every position carries Bob's likelier bit: accuracy 3/4, sifted key unchanged."""
    t = b92_run(8000, seed=7)
    alice = np.array(t.alice_bits.bits)
    bob = np.array(t.bob_bits.bits)
    assert np.mean(alice == bob) == pytest.approx(0.75, abs=0.02)
    conclusive = np.array(t.conclusive_mask)
    assert bob[conclusive].tolist() == list(t.sifted_key)
    diagonal = np.array([b is Basis.DIAGONAL for b in t.bob_bases])
    # |+> never yields |->, so the guess is bit 1 with certainty
    assert np.allclose(np.array(t.scores)[diagonal & (alice == 1)], 1.0)


def test_literal_mode_raw_statistics():
    """Raw outcomes agree with Alice half the time; recall of bit 1 is 1/4."""
    t = b92_run(8000, seed=2, mode=B92Mode.LITERAL)
    alice = np.array(t.alice_bits.bits)
    bob = np.array(t.bob_bits.bits)
    assert np.mean(alice == bob) == pytest.approx(0.5, abs=0.03)
    assert np.sum((alice == 1) & (bob == 1)) / np.sum(alice == 1) == pytest.approx(0.25, abs=0.03)


def test_bit_basis_sift_rule():
    """The literal rule keeps positions where Alice's bit equals Bob's basis bit."""
    t = B92Protocol(mode=B92Mode.LITERAL, sift_on_bit_basis=True).run(500, seed=3)
    expected = tuple(a == m.bit for a, m in zip(t.alice_bits, t.bob_bases))
    assert t.conclusive_mask == expected
    assert t.alice_bases is None


def test_eavesdropper_causes_errors():
    """Intercept-resend leaves errors on the conclusive bits."""
    t = b92_run(10_000, seed=4, eve=True)
    assert qber(t.alice_sifted, t.sifted_key) > 0.1


def test_full_depolarizing_is_chance():
    """Maximally mixed inputs give coin-flip outcomes."""
    t = b92_run(4000, channel=build_channel(ChannelKind.DEPOLARIZING, 1.0), seed=5)
    agree = np.mean(np.array(t.alice_bits.bits) == np.array(t.bob_bits.bits))
    assert agree == pytest.approx(0.5, abs=0.05)


def test_reproducible():
    """Same seed, same transcript."""
    assert b92_run(300, seed=6) == b92_run(300, seed=6)
