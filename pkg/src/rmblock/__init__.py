"""Eigenvalue statistics of Hermitian block Gaussian random matrices.

Finite-N Monte Carlo and exact quadrature of the expected resolvent, the vector
Dyson equation for the limiting density, and the closed-form microscopic limits
at the spectral origin.
"""

__version__ = "0.1.0"

from .errors import ConfigError, IOFailure, NumericError, RmblockError  # noqa: E402
from .model import VarianceProfile, classify_singularity, load_profile, validate_profile  # noqa: E402

__all__ = [
    "ConfigError",
    "IOFailure",
    "NumericError",
    "RmblockError",
    "VarianceProfile",
    "classify_singularity",
    "load_profile",
    "validate_profile",
    "__version__",
]
