"""
Error hierarchy for the star-network toolkit.

Every error raised on purpose by the library derives from StarnetError so the
CLI can map it onto an exit code.
"""


class StarnetError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidScenarioError(StarnetError, ValueError):
    """Scenario parameters outside the inequality family (n < 2, m < 2, ...)."""

    exit_code = 4


class CapacityError(StarnetError):
    """A size guard was exceeded (table size, copies, enumeration budget)."""

    exit_code = 3


class EncodingIndexError(StarnetError, IndexError):
    """Encoding row index outside 1..2^(m-1)."""

    exit_code = 4


class DimensionMismatchError(StarnetError, ValueError):
    """Operators, states or assignments with inconsistent dimensions."""


class DomainError(StarnetError, ValueError):
    """A real parameter outside its domain, e.g. visibility not in [0, 1]."""

    exit_code = 4


class NotNormalizableError(StarnetError):
    """Edge operator does not square to m times identity."""


class NumericConsistencyError(StarnetError):
    """Non-real expectation value or negative radicand beyond tolerance."""


class ImplementationInconsistencyError(StarnetError):
    """Two independent formulas for the same quantity disagree."""


class CheckFailedError(StarnetError):
    """A named verification check failed."""

    exit_code = 2

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        self.detail = detail
        message = f"check '{check}' failed"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class ExportError(StarnetError):
    """Writing or reading an exported file failed."""

    def __init__(self, path: str, detail: str):
        self.path = path
        super().__init__(f"{path}: {detail}")
