"""
Parameter estimation: QBER on a random subset of the sifted key and
the abort decision.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ProtocolError
from ..utils.seeding import make_rng
from ..value_objects import ProtocolTranscript, QberReport


DEFAULT_THRESHOLD = 0.11


def estimate_qber(
    transcript: ProtocolTranscript,
    sample_fraction: float = 1.0,
    threshold: float = DEFAULT_THRESHOLD,
    seed: int = 0,
) -> QberReport:
    """
    Mismatched bits / checked bits over a random subset of the sifted
    positions; the run aborts when the estimate exceeds `threshold`.
    """
    if not 0.0 < sample_fraction <= 1.0:
        raise ProtocolError(f"sample_fraction must lie in (0, 1], got {sample_fraction}")
    alice = np.asarray(transcript.alice_sifted, dtype=np.int64)
    bob = np.asarray(transcript.sifted_key, dtype=np.int64)
    if alice.size == 0:
        raise ProtocolError("Cannot estimate QBER on an empty sifted key")

    checked = max(1, int(round(sample_fraction * alice.size)))
    if checked < alice.size:
        picked = make_rng(seed).choice(alice.size, size=checked, replace=False)
        alice, bob = alice[picked], bob[picked]
    qber = float(np.count_nonzero(alice != bob)) / checked
    return QberReport(qber=qber, checked_bits=checked, aborted=qber > threshold, threshold=threshold)
