"""Exception types raised across the package."""
from typing import Optional


class GlanError(Exception):
    """Base class for all package errors."""


class DomainError(GlanError, ValueError):
    """Numeric input outside an operation's domain (empty vector, bad shape, bad id)."""


class ConfigurationError(GlanError, ValueError):
    """Inconsistent configuration (head count, kernel widths, generator flags)."""


class CorpusError(GlanError, ValueError):
    """Malformed or inconsistent corpus data."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SplitError(GlanError, ValueError):
    """Dataset split produced an empty partition."""


class CheckpointError(GlanError, ValueError):
    """Checkpoint file cannot be read or does not match the inputs."""


class DivergenceError(GlanError, RuntimeError):
    """Training loss became non-finite."""

    def __init__(self, epoch: int, batch: int, loss: float):
        self.epoch = epoch
        self.batch = batch
        super().__init__(f"loss diverged to {loss} at epoch {epoch}, batch {batch}")


def describe_error(error: Exception) -> str:
    """One-line description of an error, including pydantic validation errors."""
    errors = getattr(error, "errors", None)
    if callable(errors):
        try:
            first = errors()[0]
        except (TypeError, IndexError):
            return str(error).splitlines()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        message = first.get("msg", str(error))
        return f"{location}: {message}" if location else message
    text = str(error)
    return text.splitlines()[0] if text else type(error).__name__
