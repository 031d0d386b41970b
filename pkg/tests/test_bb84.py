import numpy as np
import pytest

from lab.qkd.domain.exceptions import ProtocolError
from lab.qkd.domain.metrics import qber
from lab.qkd.domain.protocols import BB84Protocol, bb84_run
from lab.qkd.domain.protocols.base import intercept_resend, prepare
from lab.qkd.domain.protocols.bb84 import bb84_bob_state
from lab.qkd.domain.quantum.noise import build_channel
from lab.qkd.domain.quantum.state import measure_distribution
from lab.qkd.domain.value_objects import Basis, ChannelKind, ProtocolName


# ============================================================================
# State preparation
# ============================================================================

@pytest.mark.parametrize("basis", list(Basis))
@pytest.mark.parametrize("bit", [0, 1])
def test_matched_basis_decodes_exactly(bit, basis):
    """Without noise, measuring in Alice's basis reproduces her bit."""
    dist = measure_distribution(bb84_bob_state(bit, basis, basis))
    assert dist[bit] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("bit", [0, 1])
def test_mismatched_basis_is_a_coin_flip(bit):
    """Measuring in the other basis gives 1/2."""
    dist = measure_distribution(bb84_bob_state(bit, Basis.RECTILINEAR, Basis.DIAGONAL))
    assert dist[1] == pytest.approx(0.5, abs=1e-12)


def test_intercept_in_same_basis_is_transparent():
    """Eve measuring in Alice's basis resends the same state."""
    state = prepare(1, Basis.DIAGONAL)
    assert intercept_resend(state, Basis.DIAGONAL, seed=3).allclose(state)


# ============================================================================
# Protocol runs
# ============================================================================

def test_noiseless_run_has_no_sifted_errors():
    """Matched-basis bits all agree and half the bits survive sifting."""
    t = bb84_run(10_000, seed=1)
    assert qber(t.alice_sifted, t.sifted_key) == 0.0
    assert t.sift_fraction == pytest.approx(0.5, abs=0.015)


def test_noiseless_accuracy_is_three_quarters():
    """All-positions agreement is 1/2 + 1/2 * 1/2."""
    t = bb84_run(4000, seed=2)
    agree = np.mean(np.array(t.alice_bits.bits) == np.array(t.bob_bits.bits))
    assert agree == pytest.approx(0.75, abs=0.03)


def test_eavesdropper_introduces_quarter_error():
    """Intercept-resend gives a 25% sifted error rate."""
    t = bb84_run(10_000, eve=True, seed=3)
    assert qber(t.alice_sifted, t.sifted_key) == pytest.approx(0.25, abs=0.03)


def test_full_bit_flip_breaks_rectilinear_bits():
    """Bit flip 1 flips every rectilinear matched bit, no diagonal one."""
    t = bb84_run(2000, channel=build_channel(ChannelKind.BIT_FLIP, 1.0), seed=4)
    rect = [
        (a, b) for a, b, la, mb in zip(t.alice_bits, t.bob_bits, t.alice_bases, t.bob_bases)
        if la is mb is Basis.RECTILINEAR
    ]
    diag = [
        (a, b) for a, b, la, mb in zip(t.alice_bits, t.bob_bits, t.alice_bases, t.bob_bases)
        if la is mb is Basis.DIAGONAL
    ]
    assert np.mean([a != b for a, b in rect]) >= 0.95
    assert np.mean([a != b for a, b in diag]) == 0.0


def test_same_seed_same_transcript():
    """Runs are reproducible from the seed."""
    assert bb84_run(200, seed=9) == bb84_run(200, seed=9)


def test_different_seeds_differ():
    """Distinct seeds give distinct key material."""
    assert bb84_run(200, seed=9).alice_bits != bb84_run(200, seed=10).alice_bits


def test_transcript_structure():
    """Mask follows basis agreement and scores lie in [0, 1]."""
    t = BB84Protocol(shots=64).run(50, seed=5)
    assert t.conclusive_mask == tuple(a is b for a, b in zip(t.alice_bases, t.bob_bases))
    assert len(t.sifted_key) == sum(t.conclusive_mask)
    assert all(0.0 <= s <= 1.0 for s in t.scores)


def test_protocol_label():
    """The default protocol name is BB84."""
    assert BB84Protocol().label == ProtocolName.BB84.label == "BB84"


@pytest.mark.parametrize("n", [0, -3])
def test_rejects_empty_key(n):
    """At least one bit must be sent."""
    with pytest.raises(ProtocolError):
        bb84_run(n, seed=0)


def test_rejects_zero_shots():
    """Bob needs at least one shot."""
    with pytest.raises(ProtocolError):
        BB84Protocol(shots=0)
