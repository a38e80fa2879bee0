"""Exception types raised across the toolkit."""


class DeaError(Exception):
    """Base class for all toolkit errors."""


class DomainError(DeaError, ValueError):
    """An argument lies outside the domain of an operation."""


class LockupError(DomainError):
    """The stretch state reached or passed the Gent extensibility limit."""

    def __init__(self, lambda_x, lambda_y, lambda_z, excess, J1):
        self.stretch = (lambda_x, lambda_y, lambda_z)
        self.excess = excess
        self.J1 = J1
        super().__init__(
            f"stretch lock-up at (lx, ly, lz) = ({lambda_x:.6g}, {lambda_y:.6g}, "
            f"{lambda_z:.6g}): I1 - 3 = {excess:.6g} >= J1 = {J1:.6g}"
        )


class DegenerateConfigurationError(DomainError):
    """A formula hit a zero denominator for the requested configuration."""


class InfeasibleDesignError(DeaError):
    """The force balance has no root in the physical bracket."""


class ConfigError(DeaError, ValueError):
    """A design config failed to parse or validate.

    ``key`` is the dotted path of the offending entry (e.g. ``material.mu1``).
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class IntegrationError(DeaError):
    """The fixed-step integrator went unstable."""


class OptimizationError(DeaError):
    """The optimizer could not make progress (e.g. all vertices infeasible)."""

    def __init__(self, message, trace=None):
        self.trace = trace or []
        super().__init__(message)


class DegeneracyWarning(UserWarning):
    """A formula returned a limiting value at a degenerate input."""
