"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/usage problems exit 1,
numerical aborts exit 2, file-format and I/O problems exit 3.
"""


class IdspaceError(Exception):
    """Base class for all package errors."""


class ConfigurationError(IdspaceError):
    """Invalid shapes, dimensions, or hyperparameter combinations."""


class UsageError(IdspaceError):
    """An API was called out of order or with the wrong artifacts."""


class GenerationError(IdspaceError):
    """Synthetic data generation could not satisfy its constraints."""


class FormatError(IdspaceError):
    """A serialized artifact is malformed, truncated, or unsupported."""


class NumericsError(IdspaceError):
    """NaN/Inf appeared where finite values are required."""
