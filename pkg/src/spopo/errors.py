"""Exception hierarchy with stable machine-readable error codes."""


class SpopoError(Exception):
    """Base class; ``code`` is the stable string emitted by the CLI."""

    code = "error"
    exit_code = 1


class ConfigError(SpopoError):
    """Malformed or inconsistent scenario configuration."""

    code = "config-error"
    exit_code = 2


class ValidationError(SpopoError):
    """Physical-domain precondition violated (bad matrix, bad parameter)."""

    code = "validation-error"
    exit_code = 3


class SpectralLeakageError(ValidationError):
    """Pump spectrum does not fit inside the frequency window."""

    code = "spectral-leakage"
    exit_code = 3


class AtThresholdError(SpopoError):
    """Cavity input-output map singular at the requested operating point."""

    code = "at-threshold"
    exit_code = 3

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class AboveThresholdError(SpopoError):
    """Pulse-train series diverges: r e^g >= 1."""

    code = "above-threshold"
    exit_code = 3


class NoFiniteThresholdError(SpopoError):
    """cos(delta_rt + delta0) = 0: no finite oscillation threshold."""

    code = "no-finite-threshold"
    exit_code = 3


class NumericalError(SpopoError):
    """Internal numerical failure (should not occur below threshold)."""

    code = "numerical-failure"
    exit_code = 4
