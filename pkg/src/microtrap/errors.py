"""Exception hierarchy shared by all modules.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class MicrotrapError(Exception):
    """Base class for all package errors."""


class ConfigError(MicrotrapError):
    """Malformed or schema-violating configuration input."""


class UnitError(ConfigError):
    """Dimensionally incompatible or unparseable unit."""


class DomainError(MicrotrapError):
    """Physically invalid argument (wrong sign, empty input, ...)."""


class SingularityError(DomainError):
    """Field requested on (or too close to) a source filament."""


class ConvergenceError(MicrotrapError):
    """An iterative solver failed to converge to the requested tolerance."""


class TrapNotFoundError(ConvergenceError):
    """Minimization ended somewhere that is not a confining field minimum."""


class CalibrationError(MicrotrapError):
    """Noise-model calibration failed its residual check."""
