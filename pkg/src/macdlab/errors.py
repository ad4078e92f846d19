"""Shared exception types."""


class MacdLabError(Exception):
    """Base class for all package errors."""


class DataError(MacdLabError):
    """Input data is missing, malformed, or insufficient for a computation."""


class UnusableSeriesError(DataError):
    """Cleaning dropped more than half of an instrument's rows."""

    def __init__(self, code: str, dropped: int, total: int):
        self.code = code
        self.dropped = dropped
        self.total = total
        super().__init__(
            f"instrument {code!r} unusable: {dropped} of {total} rows dropped by cleaning"
        )


class ConfigError(MacdLabError, ValueError):
    """A parameter or configuration value is out of its valid range."""
