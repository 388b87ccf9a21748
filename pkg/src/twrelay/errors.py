"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical failures exit 3.
"""


class ParameterError(ValueError):
    """A system parameter violates its admissible range."""


class DomainError(ValueError):
    """A function argument is outside the mathematical domain."""


class ConfigError(ValueError):
    """An experiment configuration file or preset is invalid."""


class NumericalError(RuntimeError):
    """Base class for runtime numerical failures."""


class ConvergenceError(NumericalError):
    """Quadrature or series evaluation failed to meet its tolerance."""


class BracketError(NumericalError):
    """Root bracketing failed: no sign change over the supplied interval."""


class InsufficientSamplesError(NumericalError):
    """A Monte Carlo estimate is too noisy for the requested use."""


class DegenerateCaseError(NumericalError):
    """A formula degenerates (e.g. an underflowing denominator)."""
