"""Signed Gaussian elimination for absolute value equations ``z - S|z| = c``."""

from .core import (
    AveError,
    AveInstance,
    BadParameter,
    DimensionTooLarge,
    SingularMatrix,
    StructureClass,
    TriDiagMatrix,
    ZeroPivot,
    classify,
    inf_norm,
    is_irreducible,
    is_strict_diag_dominant,
    is_tridiagonal,
    residual,
)
from .fileio import ParseError, read_instance, write_instance
from .oracle import (
    check_unique_solvability,
    enumerate_solutions,
    equilibrium_to_ave,
    sign_real_spectral_radius,
)
from .sge_dense import SchurMonitor, SgeSolution, sge_solve
from .sge_tridiag import tridiag_sge_solve

__version__ = "0.1.0"
