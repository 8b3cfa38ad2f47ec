"""Error types shared across the toolkit.

Every error raised by the public API carries a stable machine-readable
``code`` (the E_* constants below) next to the human-readable message, so
callers and the CLI can branch on the code without parsing text.
"""

E_BAD_INITIAL = "E_BAD_INITIAL"
E_UNKNOWN_STATE = "E_UNKNOWN_STATE"
E_TERMINAL_STATE = "E_TERMINAL_STATE"
E_RESERVED_ACTION = "E_RESERVED_ACTION"
E_EMPTY_SYSTEM = "E_EMPTY_SYSTEM"
E_EMPTY_APPROX = "E_EMPTY_APPROX"
E_NONDETERMINISTIC_SYSTEM = "E_NONDETERMINISTIC_SYSTEM"
E_REQUEST_REJECTED = "E_REQUEST_REJECTED"
E_SESSION_CLOSED = "E_SESSION_CLOSED"
E_PARSE = "E_PARSE"
E_NAME_CLASH = "E_NAME_CLASH"


class CompositionError(Exception):
    """Base class for all toolkit errors.

    Attributes:
        code: one of the E_* constants.
        message: human-readable description.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message


class ValidationError(CompositionError):
    """A behavior or system description violates a model-level contract."""


class ProductError(CompositionError):
    """A product construction was asked of an unusable system."""


class ApproxError(CompositionError):
    """An approximation artifact cannot support the requested operation."""


class GameError(CompositionError):
    """The game reduction's preconditions do not hold."""


class SessionError(CompositionError):
    """A session step could not be carried out."""


class ParseError(CompositionError):
    """A problem document is syntactically or structurally bad."""

    def __init__(self, message: str, location: str | None = None):
        if location:
            message = f"{message} (at {location})"
        super().__init__(E_PARSE, message)
        self.location = location


class ExportError(CompositionError):
    """A model cannot be rendered in the requested output format."""
