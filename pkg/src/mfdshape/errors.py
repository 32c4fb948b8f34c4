"""Exception types shared across the pipeline.

The CLI maps ``ParseError``/``OSError`` to exit status 2 and
``PreconditionError`` to exit status 3.
"""


class MfdShapeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MfdShapeError):
    """Malformed or truncated input file."""

    def __init__(self, message, offset=None, path=None):
        self.offset = offset
        self.path = path
        parts = []
        if path is not None:
            parts.append(str(path))
        if offset is not None:
            parts.append(f"byte {offset}")
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class PreconditionError(MfdShapeError, ValueError):
    """A domain precondition was violated (empty shape, bad parameter, ...)."""


class ConsistencyError(MfdShapeError, RuntimeError):
    """An internal numerical sanity check failed."""
