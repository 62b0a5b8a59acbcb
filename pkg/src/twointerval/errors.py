"""Exception hierarchy shared by all modules."""


class TwoIntervalError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TwoIntervalError, ValueError):
    """Invalid user input: geometry, model parameters, config files."""


class NumericalError(TwoIntervalError, ArithmeticError):
    """A numerical routine could not deliver a trustworthy result."""


class DegenerateOccupationError(NumericalError):
    """The Fermi energy coincides with a dispersion root."""


class SingularMinorError(NumericalError):
    """A leading principal minor vanished during the unpivoted ladder."""

    def __init__(self, index: int, pivot: complex, condition: float):
        self.index = index
        self.pivot = pivot
        self.condition = condition
        super().__init__(
            f"leading principal minor {index + 1} is singular "
            f"(pivot {pivot!r}, condition estimate {condition:.3e}); "
            "perturb lambda off the real axis")


class BranchPointError(NumericalError):
    """lambda sits on a branch point or branch cut of the exponents."""


class SpectrumError(NumericalError):
    """Eigen-solver failure or spectrum outside its admissible range."""


class ContourError(NumericalError):
    """A contour node violates the validity condition of the asymptotics."""


class MultipleJumpError(ConfigurationError):
    """The occupation has more than one jump pair on the unit circle."""


class MultivaluedInverseError(NumericalError):
    """The sea profile is not monotone, so theta(f) has several branches."""
