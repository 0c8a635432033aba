"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inconsistent or malformed model data (dimension mismatches, bad pmfs)."""


class UsageError(ValueError):
    """A call that violates an operation's preconditions."""


class ConsistencyError(RuntimeError):
    """An internal invariant failed; indicates a bug or tolerance trouble."""
