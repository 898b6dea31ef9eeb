"""Exception hierarchy shared across the package."""


class LTDPSError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LTDPSError, ValueError):
    """An argument lies outside the domain of the operation (bad id, bad matrix...)."""


class IdentificationError(LTDPSError):
    """An RSSI sample (or AP set) does not identify any region."""


class IndecisiveError(LTDPSError):
    """Tracking evidence does not single out a next region."""


class PredictionError(LTDPSError):
    """A next-AP prediction was requested over an empty candidate set."""


class InvalidPathError(DomainError):
    """A mobile path violates the consistency/adjacency invariants."""


class PathFormatError(LTDPSError, ValueError):
    """A history file line could not be parsed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ProtocolError(LTDPSError):
    """Illegal reservation stage transition."""


class ConfigError(LTDPSError, ValueError):
    """Bad or unknown configuration key."""
