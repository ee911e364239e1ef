"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, ``DataError``
and ``ConfigError`` exit 2, everything else (including ``TrainingError``
and ``LabelTransportError``) exits 3.
"""


class PtrankError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PtrankError):
    """A parameter or configuration value is out of contract."""


class DataError(PtrankError):
    """Input data violates a schema, an invariant, or a precondition."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class LabelParseError(DataError):
    """A labeler response did not match the response contract.

    The offending raw payload is attached for diagnosis.
    """

    def __init__(self, message: str, payload: object = None):
        super().__init__(message)
        self.payload = payload


class LabelTransportError(PtrankError):
    """The labeler endpoint could not be reached after all retries."""


class TrainingError(PtrankError):
    """Training aborted (divergence, non-finite gradients, bad state)."""
