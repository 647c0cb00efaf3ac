"""mielab: measurement-induced entanglement diagnostics.

Stabilizer-circuit simulation, CSS/sign-structure analysis, percolation
cluster dynamics, and dense exact diagonalization for small critical
chains, plus the statistics and CLI glue to run experiments end to end.
"""

from .pauli import PauliString, pauli_mul, pauli_inverse, pauli_commutes
from .gf2 import BinaryMatrix, gf2_rank, gf2_in_span

__version__ = "0.1.0"
