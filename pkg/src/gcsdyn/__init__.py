"""Generalized coherent-state dynamics.

Classical phase-space flows for the Heisenberg-Weyl, SU(2), SU(1,1) and
U(N+1) coherent-state families, and exact quantum evolution in truncated
bases to check that one classical trajectory describes every representation.
"""

from .algebra import Group, RepLabel, hamiltonian_matrix
from .exceptions import (ChartSingularityError, DomainExitError, ErrorBudgetExceeded,
                         GCSError, MobiusDegeneracyError, TruncationError,
                         TruncationLeakError)
from .tracks import CoefficientTrack, Constant, PiecewiseConstant, Sampled, Sinusoid

__version__ = "0.1.0"

__all__ = [
    "Group",
    "RepLabel",
    "hamiltonian_matrix",
    "CoefficientTrack",
    "Constant",
    "PiecewiseConstant",
    "Sinusoid",
    "Sampled",
    "GCSError",
    "DomainExitError",
    "ErrorBudgetExceeded",
    "ChartSingularityError",
    "TruncationLeakError",
    "TruncationError",
    "MobiusDegeneracyError",
    "__version__",
]
