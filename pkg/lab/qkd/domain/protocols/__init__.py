"""
Baseline key distribution protocols: BB84, B92 and QBER estimation.
"""

from .b92 import B92Protocol, b92_run
from .base import KeyProtocol
from .bb84 import BB84Protocol, bb84_run
from .qber import estimate_qber

__all__ = [
    "B92Protocol",
    "BB84Protocol",
    "KeyProtocol",
    "b92_run",
    "bb84_run",
    "estimate_qber",
]
