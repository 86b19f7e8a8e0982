"""
Error types for the norm calculus engine

Every failure raised by the library derives from NormCalcError. The CLI maps
the three families below onto its exit codes:

    InputError        -> 2  (malformed files, unknown presets, ill-typed input)
    CapExceededError  -> 3  (a configured resource cap was hit)
    InvariantViolation-> 4  (an internal cross-check disagreed; this is a bug)

A negative mathematical answer is never an exception.
"""

from typing import Any, Optional


EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2
EXIT_CAP_EXCEEDED = 3
EXIT_INVARIANT = 4


class NormCalcError(Exception):
    """Base class for all engine errors"""


class InputError(NormCalcError, ValueError):
    """Malformed or inconsistent input"""


class CapExceededError(NormCalcError):
    """A configured size cap was exceeded"""

    def __init__(self, what: str, limit: int, actual: Optional[int] = None):
        self.what = what
        self.limit = limit
        self.actual = actual
        detail = f" (got {actual})" if actual is not None else ""
        super().__init__(f"{what} exceeds the configured cap of {limit}{detail}")


class InvariantViolation(NormCalcError):
    """Two independent computations of the same quantity disagreed"""


class UnknownPresetError(InputError):
    pass


class InvalidPermutationError(InputError):
    pass


class GroupMismatchError(InputError):
    pass


class NotASubgroupError(InputError):
    pass


class LevelMismatchError(InputError):
    pass


class InvalidRepresentationError(InputError):
    pass


class BoundaryMismatchError(InputError):
    pass


class ParseError(InputError):
    """Syntax error in an expression or G-set literal"""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")


class TypeCheckError(InputError):
    pass


class InadmissibleError(InputError):
    """A norm or internal norm was applied to a set that is not admissible"""

    def __init__(self, message: str, offending: Any = None):
        self.offending = offending
        super().__init__(message)


class RuleNotApplicableError(NormCalcError):
    pass


def exit_code_for(error: BaseException) -> int:
    """Map an exception onto the CLI exit-code contract"""
    if isinstance(error, CapExceededError):
        return EXIT_CAP_EXCEEDED
    if isinstance(error, InvariantViolation):
        return EXIT_INVARIANT
    return EXIT_INPUT_ERROR
