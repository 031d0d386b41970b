"""
Exact simulation of one and two qubits: gates, density matrices,
measurement and Kraus noise channels.
"""

from .gates import make_gate
from .noise import KrausChannel, apply_channel, build_channel
from .state import (
    DensityMatrix,
    apply_gate,
    marginal,
    measure_distribution,
    readout,
    sample_shots,
)

__all__ = [
    "DensityMatrix",
    "KrausChannel",
    "apply_channel",
    "apply_gate",
    "build_channel",
    "make_gate",
    "marginal",
    "measure_distribution",
    "readout",
    "sample_shots",
]
