"""
Domain layer for quantum key distribution.

This package holds the quantum kernels, protocols, learners and
metrics as pure functions and value objects, independent of any
optimizer library, metrics library or output format.
"""
