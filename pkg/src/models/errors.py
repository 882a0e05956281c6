from typing import Optional


class LiesymError(Exception):
    """Base class for every error raised by the library."""


class DimensionMismatchError(LiesymError, ValueError):
    pass


class UnsupportedGroupError(LiesymError, ValueError):
    pass


class GroupMismatchError(LiesymError, ValueError):
    pass


class NonFiniteInputError(LiesymError, ValueError):
    pass


class AlgebraClosureError(LiesymError, ArithmeticError):
    """A bracket left the span of the algebra basis."""


class RepresentationError(LiesymError, ValueError):
    pass


class DictionarySizeError(LiesymError, ValueError):
    pass


class InsufficientSamplesError(LiesymError, ValueError):
    pass


class SingularGramError(LiesymError, ArithmeticError):
    pass


class MissingFramesError(LiesymError, ValueError):
    pass


class SingularFrameError(LiesymError, ArithmeticError):
    """A tangent frame is not a graph over the input coordinates."""


class InfeasibleError(LiesymError, ValueError):
    pass


class InvalidParameterError(LiesymError, ValueError):
    pass


class ConfigError(LiesymError, ValueError):
    """Configuration problem, optionally pinned to a line of the source file."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(self._format())

    def _format(self) -> str:
        where = self.path or "<config>"
        if self.line is not None:
            return f"{where}:{self.line}: {self.message}"
        return f"{where}: {self.message}"
