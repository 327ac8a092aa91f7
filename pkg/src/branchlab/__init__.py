"""branchlab: every integer branch of the Lambert W function.

Certified multi-method evaluation (iteration, series, contour integral),
exact rational polynomial families underlying the branch expansions, and
numeric verification of the symmetric-sum, product, and asymptotic
identities those branches satisfy.
"""

from .errors import BranchLabError, ConvergenceError, DomainError

__version__ = "0.1.0"

__all__ = [
    "BranchLabError",
    "ConvergenceError",
    "DomainError",
    "__version__",
]
