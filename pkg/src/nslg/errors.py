"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the physical domain of an operation."""


class InconsistencyError(ArithmeticError):
    """Inputs that should be mutually consistent are not."""


class StepSizeError(RuntimeError):
    """The fixed-step integrator could not keep the dispersion positive."""


class DiagnosticsError(RuntimeError):
    """A numerical diagnostic is under-resolved (grid or step too coarse)."""
