"""Exception hierarchy with stable machine-readable error codes.

The CLI serializes these to JSON so scripts can assert the *kind* of a
failure (e.g. an inconsistent congruence system vs. a violated
precondition) instead of string-matching messages.
"""


class MdcrtError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "ERROR"


class SingularMatrixError(MdcrtError):
    code = "SINGULAR_MATRIX"


class ShapeError(MdcrtError):
    code = "SHAPE_MISMATCH"


class InconsistentSystemError(MdcrtError):
    """A congruence system admits no solution.

    ``index`` names the congruence that failed to merge with the ones
    before it (None for scalar systems reported without positions).
    """

    code = "CRT_INCONSISTENT"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConditionViolatedError(MdcrtError):
    """A stated precondition of an operation does not hold."""

    code = "CONDITION_VIOLATED"


class EnumerationCapError(MdcrtError):
    """An enumeration (residues, lattice points) would exceed its cap."""

    code = "ENUM_CAP_EXCEEDED"
