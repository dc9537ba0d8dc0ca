"""Shared exception types."""


class ConfigurationError(ValueError):
    """Raised when a configuration object violates its declared constraints."""
