from enum import IntEnum
import sys


class ErrorCodes(IntEnum):
    VERIFY_ERR = 1
    PRECONDITION_ERR = 2
    UNKNOWN_ERR = 3

    def exit(self, msg: str = ""):
        if msg:
            print(f"{self.name}: {msg}", file=sys.stderr)
        sys.exit(int(self))


class ArboreqError(Exception):
    """Base class for errors raised by the library."""


class ParameterError(ArboreqError, ValueError):
    """Invalid parameters or malformed input."""


class StructuralError(ArboreqError):
    """The graph is not in the class an operation requires."""


class PreconditionError(ArboreqError):
    """An operation precondition does not hold for the given input."""


class HypothesisViolation(PreconditionError):
    """A hypothesis of the peel merge is violated.

    The `clause` attribute names the failed hypothesis, e.g. ``"usage"``
    (a color used more than `m` times) or ``"dangerous"`` (two holders of
    a dangerous color).

    """

    def __init__(self, clause: str, msg: str):
        super().__init__(f"[{clause}] {msg}")
        self.clause = clause


class InternalConsistencyError(ArboreqError):
    """A proven bound or a post-verification failed; indicates a bug."""


class Infeasible(ArboreqError):
    """An exhaustive search showed that no valid coloring exists."""

    def __init__(self, msg: str, refutation: object = None):
        super().__init__(msg)
        self.refutation = refutation


class BudgetExhausted(ArboreqError):
    """A search ran out of nodes or time before deciding."""


def format_exc(exc: Exception, notes: str = "") -> str:
    """Format an exception as a string."""
    if notes:
        # NOTE: the get-set madness is to pass linting on 3.10
        _notes = getattr(exc, "__notes__", [])
        _notes += [notes]
        setattr(exc, "__notes__", _notes)
    err = f"[red][bold]{exc.__class__.__name__}:[/red][/bold] {exc}"
    trailer = ", ".join(getattr(exc, "__notes__", []))
    if trailer:
        err += f"\n\n[bold]{trailer}"
    return err
