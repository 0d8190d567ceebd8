"""Exception hierarchy shared across the package.

Callers can catch ``BoomerangError`` to handle any domain failure, or the
narrower subclasses to distinguish bad inputs from failed verification.
"""


class BoomerangError(Exception):
    """Base class for all domain errors raised by this package."""


class UsageError(BoomerangError):
    """An operation was invoked with arguments or in a state it does not allow."""


class VerificationError(BoomerangError):
    """Cryptographic verification failed (wrong preimage, bad signature, ...)."""


class WindowClosedError(BoomerangError):
    """A claim arrived outside the contract's time window."""


class InsufficientEvaluationsError(BoomerangError):
    """Too few polynomial evaluations to pin down the secret."""


class InconsistentEvidenceError(BoomerangError):
    """Duplicate evaluation indices disagree on the value."""


class ConfigError(UsageError):
    """A configuration file or field failed validation."""
