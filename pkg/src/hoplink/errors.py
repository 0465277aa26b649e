"""Exception types, mapped one-to-one onto the CLI exit codes."""


class HoplinkError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HoplinkError):
    """Invalid configuration value or malformed config file (exit code 2)."""


class DataError(HoplinkError):
    """Missing, malformed, or inconsistent input data (exit code 3)."""


class NumericError(HoplinkError):
    """Numeric failure: non-finite values or non-convergence (exit code 4)."""
