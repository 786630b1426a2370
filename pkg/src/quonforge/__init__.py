"""Exact and floating-point toolkit for quon algebras at roots of unity.

Covers k-fermion representations, generalized Weyl-Heisenberg algebras and
fractional supersymmetric quantum mechanics, the SU(2) polar decomposition
with its Pauli group, mutually unbiased bases in prime dimension and a
SIC-POVM verifier.
"""

from .cyclo import Cyclo, RootVector, cyclotomic_polynomial, exp2pi, root_of_unity
from .matrixcore import EXACT, FLOAT, Operator, commutator, q_commutator
from .report import RelationCheck, RelationReport

__all__ = [
    "Cyclo",
    "RootVector",
    "cyclotomic_polynomial",
    "exp2pi",
    "root_of_unity",
    "EXACT",
    "FLOAT",
    "Operator",
    "commutator",
    "q_commutator",
    "RelationCheck",
    "RelationReport",
]

__version__ = "0.1.0"
