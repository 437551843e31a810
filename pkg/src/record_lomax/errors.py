"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateEstimateError(ValueError):
    """The data admit no estimate inside the parameter space (theta_hat = 0)."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""
