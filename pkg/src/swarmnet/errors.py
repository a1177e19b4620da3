"""Exception types, grouped by how the CLI maps them to exit codes."""


class SwarmnetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SwarmnetError):
    """Invalid configuration value or unparseable config file (exit code 1)."""


class DataError(SwarmnetError):
    """Missing, malformed, or inconsistent input data (exit code 2)."""


class NumericError(SwarmnetError):
    """A computation produced a non-finite or unusable value (exit code 3)."""
