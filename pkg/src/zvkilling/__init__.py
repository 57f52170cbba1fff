"""Exact search for polynomial first integrals of geodesic flows.

The pipeline runs metric -> Hamiltonian -> the linear PDE system from
{H, I} = 0 -> parity split -> prolongation -> exact rank at a rational
point. The result is a per-level Delta table and a verdict.
"""

from .analysis import (CANDIDATE, INCONCLUSIVE, NO_NONTRIVIAL, DeltaTable, FiniteTypeReport, IntegralSearch,
                       TrivialBasis, Verdict, delta_table, finite_type_level, trivial_basis, trivial_jet_vectors,
                       verdict)
from .exactla import SparseRationalMatrix, compute_rank, rank_exact, rank_modular
from .metric import Hamiltonian, MetricSpec, hamiltonian, invert, zipoy_voorhees
from .pde import LinearPDESystem, build_system, poisson_bracket_system, split_parity
from .prolongation import assemble, prolong, symbol_assemble

__version__ = "0.1.0"
