"""Two-interval free-fermion spectra: exact covariance diagonalization and
large-separation asymptotics of the determinant ratios."""

from .errors import ConfigurationError, NumericalError, TwoIntervalError
from .gaussian_core import CovarianceKind, Geometry, build_covariance, spectrum
from .orthopoly import Growth, det_ratio
from .rh.asymptotics import det_ratio_asymptotic
from .symbol import OccupationSymbol, from_occupation, from_step

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "CovarianceKind", "Geometry", "Growth", "NumericalError",
    "OccupationSymbol", "TwoIntervalError", "build_covariance", "det_ratio",
    "det_ratio_asymptotic", "from_occupation", "from_step", "spectrum",
]
