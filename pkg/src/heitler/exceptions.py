"""Exception hierarchy shared across the package."""


class HeitlerError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(HeitlerError, ValueError):
    """A physical or numerical parameter violates its documented range."""


class UnsupportedConfigurationError(HeitlerError, ValueError):
    """The requested evaluation path does not cover this configuration.

    Raised, for example, when a closed-form expression derived for a
    resonant drive is asked for a detuned emitter; the optical Bloch
    oracle handles those cases.
    """


class NoEmissionError(HeitlerError, ValueError):
    """The emitter scatters no light, so a normalized quantity is undefined."""


class ResolutionError(HeitlerError, ValueError):
    """A sampled grid is too coarse (or too short) for the requested operation."""


class IntegrationError(HeitlerError, RuntimeError):
    """A numerical propagation failed to reach its tolerance."""

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


class ConfigError(HeitlerError, ValueError):
    """A scenario configuration is malformed or references missing files."""
