"""
Application layer for laboratory experiments.

This layer orchestrates domain protocols and ports to perform
single runs, comparison tables, noise sweeps, convergence traces
and PQC training.
"""
