"""Exception hierarchy shared by all modules."""


class CBFError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CBFError, ValueError):
    """An argument lies outside the domain of an operation."""


class ModelError(CBFError, ValueError):
    """A fibration model fails its validity conditions.

    ``violations`` holds the individual :class:`cbf.model.Violation` records.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NonKltError(ModelError):
    """A horizontal coefficient is >= 1, so the fiber integral diverges."""


class DegenerateRegionError(CBFError):
    """Monte Carlo found no admissible sample in the fiber."""


class QuadratureError(CBFError):
    """Adaptive quadrature hit its subdivision cap.

    ``estimate`` carries the partial value computed before giving up.
    """

    def __init__(self, message, estimate=float("nan")):
        super().__init__(message)
        self.estimate = estimate


class FitError(CBFError, ValueError):
    """Asymptotic fit could not be carried out on the supplied samples."""
