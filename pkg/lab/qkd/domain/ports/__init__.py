"""
Domain ports (interfaces) for optimizers, metric engines and report
writers.

Concrete implementations live in the infrastructure layer.
"""

from .metrics_engine import MetricsEngine
from .optimizer import Objective, PqcOptimizer
from .report_writer import ReportWriter

__all__ = [
    "MetricsEngine",
    "Objective",
    "PqcOptimizer",
    "ReportWriter",
]
