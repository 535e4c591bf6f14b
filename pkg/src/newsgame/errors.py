"""Exception types shared across the package."""


class NewsgameError(Exception):
    """Base class for all package errors."""


class DomainError(NewsgameError, ValueError):
    """Inputs fall outside the region where the model is defined."""


class SearchError(NewsgameError, RuntimeError):
    """A bracketing or optimisation search failed to produce a valid answer."""


class ConfigError(NewsgameError, ValueError):
    """A configuration file is missing fields or contains invalid ones."""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
