"""Exception hierarchy shared by the library and the CLI.

Each exception carries the process exit code the CLI uses for it:
0 success, 1 verification failure, 2 input error, 3 capacity.
"""


class HyperstabError(Exception):
    """Base class for all hyperstab errors."""

    exit_code: int = 1


class InputError(HyperstabError, ValueError):
    """Raised when user-supplied data (files, subsets, flags) is invalid."""

    exit_code = 2


class CapacityError(HyperstabError):
    """Raised when an instance exceeds a configured enumeration or memory bound."""

    exit_code = 3


class InvariantViolation(HyperstabError):
    """Raised when an internal object breaks one of its invariants."""

    exit_code = 1


class UndefinedEntropyError(HyperstabError, ValueError):
    """Raised when an entropy is requested for the zero vector."""

    exit_code = 2


class VerificationFailure(HyperstabError):
    """Raised when a cross-check between engines or against theory fails."""

    exit_code = 1
