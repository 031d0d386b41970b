"""
Learning components: the QRL angle search, the parameterized circuit
and the QNN-integrated protocols.

Submodules are imported explicitly (`from lab.qkd.domain.learning.qrl
import ...`) because the protocols package depends on `pqc`.
"""
