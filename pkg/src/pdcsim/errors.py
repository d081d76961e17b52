"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class IntegrationFailure(RuntimeError):
    """The adaptive integrator could not reach the requested tolerance."""


class TruncationError(RuntimeError):
    """A Fock cutoff is too small for the requested computation."""


class NumericalFailure(RuntimeError):
    """A linear solve or eigenproblem did not converge to tolerance."""


class StepSizeError(RuntimeError):
    """A stochastic integration left the stable region at the given step."""


class ConfigError(ValueError):
    """A configuration file could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
