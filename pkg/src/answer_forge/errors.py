"""Exception and warning types shared across the package."""


class AnswerForgeError(Exception):
    """Base class for all package errors."""


class ValidationError(AnswerForgeError, ValueError):
    """Invalid configuration, dataset or split definition."""


class ParseError(ValidationError):
    """A file could not be parsed.

    ``line`` is the 1-based line number when the problem is line-local.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ContractError(AnswerForgeError, ValueError):
    """A function was called with arguments violating its preconditions."""


class NotFoundError(AnswerForgeError, KeyError):
    """A token or item is missing from a lookup structure."""

    def __str__(self):
        return str(self.args[0]) if self.args else "not found"


class EmptyResultError(AnswerForgeError):
    """An operation had nothing to work with (empty table, all OOV, ...)."""


class ProviderError(AnswerForgeError):
    """An answer provider failed for a specific prompt."""

    def __init__(self, message, prompt_index=None):
        self.prompt_index = prompt_index
        if prompt_index is not None:
            message = f"prompt {prompt_index}: {message}"
        super().__init__(message)


class ProviderParseError(ProviderError, ParseError):
    """A provider returned a body that does not follow the wire contract."""

    def __init__(self, message, prompt_index=None):
        ProviderError.__init__(self, message, prompt_index)


class TrainingError(AnswerForgeError):
    """Training produced a non-finite loss."""


class ZeroVectorWarning(RuntimeWarning):
    """Cosine similarity was requested for an all-zero vector."""


class AbsentTruthWarning(RuntimeWarning):
    """The ground-truth answer is missing from the ranked pool."""
