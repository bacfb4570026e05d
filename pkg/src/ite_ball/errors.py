"""Exception hierarchy shared by all modules."""


class IteError(Exception):
    """Base class for every error raised by ite_ball."""


class DomainError(IteError, ValueError):
    """Argument outside the domain of the requested function."""


class PoleError(IteError, ArithmeticError):
    """Evaluation point sits (numerically) on a pole, e.g. a zero of J_nu."""

    def __init__(self, message, nu=None, point=None):
        super().__init__(message)
        self.nu = nu
        self.point = point


class ConditionError(IteError, ValueError):
    """Medium pair violates both the isotropic and the anisotropic condition."""


class IntegratorError(IteError, RuntimeError):
    """Radial ODE integration did not reach the requested tolerance."""


class BoundaryZeroError(IteError, RuntimeError):
    """A zero lies on (or too close to) a contour wall."""


class PhaseStepError(IteError, RuntimeError):
    """Adaptive phase continuation exceeded its sampling budget."""


class DepthExhaustedError(IteError, RuntimeError):
    """Subdivision reached max_depth without isolating the zeros."""


class NewtonEscapeError(IteError, RuntimeError):
    """Newton iterate left its certified box."""
