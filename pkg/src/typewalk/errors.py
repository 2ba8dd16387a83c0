"""Exception hierarchy shared across the package.

Each class carries the process exit code the command-line front end uses
when the error escapes a subcommand.
"""


class TypewalkError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParseError(TypewalkError):
    """Malformed input file: bad token, bad row, unknown node id."""

    exit_code = 2


class EmptyGraphError(TypewalkError):
    """Edge list contained no usable edges after cleaning."""

    exit_code = 2


class ParameterError(TypewalkError):
    """Argument outside its documented range or inconsistent configuration."""

    exit_code = 3


class SizeLimitError(TypewalkError):
    """Input too large for an enumeration-based code path."""

    exit_code = 3


class CorpusMismatchError(TypewalkError):
    """Walk corpus emits symbols outside the model's type range."""

    exit_code = 3


class EmptyCorpusError(TypewalkError):
    """No walk could be started (every node isolated)."""

    exit_code = 4


class DegenerateNodeError(TypewalkError):
    """Operation requires a node with at least one neighbor."""

    exit_code = 4


class SplitInfeasibleError(TypewalkError):
    """Edge split cannot meet its removal or negative-sampling target."""

    exit_code = 4


class DegenerateLabelsError(TypewalkError):
    """Classifier training data contains a single class."""

    exit_code = 4


class UndefinedAUCError(TypewalkError):
    """AUC requested for scores with a single class present."""

    exit_code = 4
