"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`CofactorError`
so callers (and the CLI) can catch the whole family at once.
"""


class CofactorError(Exception):
    """Base class for all library errors."""


class InvalidInput(CofactorError):
    """Non-finite entries, zero axes, non positive-definite stretches, ..."""


class NotCompatible(CofactorError):
    """A quotient that should be a rotation is not, or two wells are not rank-one connected."""


class DegenerateAxis(CofactorError):
    """The two-fold axis leaves U invariant (reflected variant equals U)."""


class NotCompound(CofactorError):
    """The axis is not perpendicular to any eigenvector of U."""


class NotSimilar(CofactorError):
    """Two stretch tensors do not share a spectrum."""


class InconsistentInput(CofactorError):
    """Internal identities that must hold for related variants are violated."""


class NoHabitPlane(CofactorError):
    """The middle eigenvalue of the Gram matrix is not 1."""

    def __init__(self, message, residual=float("nan"), g=None):
        super().__init__(message)
        self.residual = residual
        self.g = g


class Degenerate(CofactorError):
    """Coinciding outer eigenvalues; the habit-plane formulas break down."""


class AmbiguousMiddleEigenvector(CofactorError):
    """The middle eigenvalue is repeated, so v2 is not defined."""


class DegenerateVariants(CofactorError):
    """Lattice parameters produce coinciding variants or repeated eigenvalues."""


class NotSupercompatible(CofactorError):
    """Cofactor conditions fail at the requested tolerance.

    The offending report is attached as ``report``; ``residual`` is the
    largest violated quantity.
    """

    def __init__(self, message, report=None, residual=float("nan")):
        super().__init__(message)
        self.report = report
        self.residual = residual


class NoSolution(CofactorError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class InputError(CofactorError):
    """Schema violation in a user-supplied file.  ``field`` is a dotted path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NoLambda2Curve(CofactorError):
    """Screening found no sign change of lambda2 - 1 along y."""


class NoCrossing(CofactorError):
    """Screening found no sign change of the type residual along the lambda2 = 1 curve."""
