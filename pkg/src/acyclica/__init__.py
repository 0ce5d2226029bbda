"""Exact verification of acyclic, noncontractible complexes at finite truncation.

Submodules: exactla (exact linear algebra), gradedcomplex (bigraded
complexes), polykoszul (polynomial rings), symcoalgebra (symmetric
coalgebras), stability (parameter sweeps), endotransfer (Dress lemma),
monomialalg (the universal monomial algebra), cli.
"""
from .exactla import DEFAULT_FIELD, GF, QQ, FieldScalar, SparseMatrix, kernel_basis, parse_field, rank, solve_feasible
from .gradedcomplex import (
    BigradedComplex,
    ChainMap,
    CohomologyTable,
    Window,
    build_complex,
    cohomology,
    dualize,
    hom_complex,
    null_homotopy,
    tensor,
)

__all__ = [
    "DEFAULT_FIELD", "GF", "QQ", "FieldScalar", "SparseMatrix", "kernel_basis", "parse_field", "rank",
    "solve_feasible", "BigradedComplex", "ChainMap", "CohomologyTable", "Window", "build_complex", "cohomology",
    "dualize", "hom_complex", "null_homotopy", "tensor",
]

__version__ = "0.1.0"
