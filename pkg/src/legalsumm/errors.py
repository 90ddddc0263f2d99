"""Exception hierarchy shared across the harness."""


class LegalsummError(Exception):
    """Base class for all harness errors."""


class InputError(LegalsummError):
    """A required input file or directory is missing or unreadable."""


class ValidationError(LegalsummError):
    """Input data violates a structural contract (schema, uniqueness, ranges)."""


class BackendError(LegalsummError):
    """A summarization backend failed after exhausting retries."""

    def __init__(self, message, chunk_index=None):
        super().__init__(message)
        self.chunk_index = chunk_index


class ExternalServiceError(LegalsummError):
    """A remote scorer (NLI/NER) call failed."""


class ConfigError(LegalsummError):
    """Run configuration is invalid; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
