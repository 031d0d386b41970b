"""
Quantum key distribution laboratory.

Baseline BB84/B92, reinforcement-learning angle search (QRL) and
QNN-assisted key agreement, evaluated under single-qubit noise.
"""
