"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
ConsistencyError -> 4.
"""


class ProfileMapError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ProfileMapError, ValueError):
    """An argument, flag, or configuration value is invalid."""


class DataError(ProfileMapError):
    """Input data is malformed or unusable (bad row, missing file, ...)."""


class ConsistencyError(ProfileMapError):
    """An internal numeric or structural invariant was violated."""
