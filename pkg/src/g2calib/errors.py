"""Exception hierarchy shared by all modules."""


class G2CalibError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInputError(G2CalibError, ValueError):
    """Input vectors are (numerically) linearly dependent."""


class DegreeError(G2CalibError, ValueError):
    """A form has the wrong degree for the requested operation."""


class NotPositiveFormError(G2CalibError, ValueError):
    """A 3-form does not induce a positive definite metric."""


class PreconditionError(G2CalibError, ValueError):
    """An operation was called on geometric data violating its hypotheses."""


class InvariantViolation(G2CalibError, RuntimeError):
    """A structural identity that must hold failed numerically.

    These are never silently repaired; they indicate either a bug or input
    that is outside the regime where the identity is a theorem.
    """


class AdmissibilityError(G2CalibError, ValueError):
    """Adjacent line samples are (nearly) orthogonal; the mesh must be refined."""


class ResolutionError(G2CalibError, ValueError):
    """A discretised quantity is too far from an integer to be trusted."""


class TopologyError(G2CalibError, ValueError):
    """A triangle list does not describe a closed oriented surface."""


class GroupOverflowError(G2CalibError, ValueError):
    """Closure of a set of generators exceeded the allowed group order."""
