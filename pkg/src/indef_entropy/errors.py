"""Exception types raised by the interpolation / entropy / Szego pipeline.

Every error derives from :class:`IndefEntropyError` so callers can catch the
whole family at once (the scenario runner does exactly that and records the
failure per experiment instead of aborting the run).
"""


class IndefEntropyError(Exception):
    """Base class for all package errors."""


class InvalidSpec(IndefEntropyError):
    """A domain object violates its construction invariants."""


class NonHermitianInput(InvalidSpec):
    """A block that must be Hermitian is not (beyond tolerance)."""


class SingularS(IndefEntropyError):
    """The assembled Toeplitz matrix is numerically singular."""


class AmbiguousInertia(IndefEntropyError):
    """An eigenvalue sits inside the inertia dead band; signature undecidable."""


class RankDeficientY(IndefEntropyError):
    """Last block row of S^{-1}Pi lost rank; contradicts invertibility of S."""


class EvaluationFailure(IndefEntropyError):
    """A parameter function could not be evaluated where it was needed."""


class InconsistentConditions(IndefEntropyError):
    """The two equivalent nondegeneracy determinants disagree."""


class PoleHit(IndefEntropyError):
    """Resolvent requested exactly at a spectral point."""


class PoleProximity(EvaluationFailure):
    """Evaluation point too close to a real pole of the parameter."""


class SingularPhat(IndefEntropyError):
    """Upper component of the rotated pair is singular; pair degenerate."""


class BoundaryPole(IndefEntropyError):
    """Boundary Moebius map evaluated at its exceptional point."""


class FramePole(IndefEntropyError):
    """Frame evaluation at the unique pole of the transfer matrix."""


class DenominatorSingular(IndefEntropyError):
    """LFT denominator numerically singular at this point."""


class SolutionPole(DenominatorSingular):
    """The interpolant has a pole at the requested disk point."""


class ResolventPole(IndefEntropyError):
    """Resolvent of the shift matrix requested at one of its eigenvalues."""


class PoleInsideRadius(IndefEntropyError):
    """Taylor extraction circle encloses a pole of the target function."""


class NonConvergent(IndefEntropyError):
    """Two-radius Taylor extraction disagrees beyond tolerance."""


class CoefficientMismatch(IndefEntropyError):
    """Extracted Taylor data does not reproduce the prescribed blocks."""


class NonIntegrable(IndefEntropyError):
    """Boundary density is negative on a set of panels; entropy undefined."""


class NoConvergence(IndefEntropyError):
    """Adaptive quadrature exhausted its node budget above tolerance."""


class ParameterPole(EvaluationFailure):
    """Parameter function has a pole at the mapped evaluation point."""


class ZeroOnContour(IndefEntropyError):
    """Argument-principle contour passes through (or too near) a zero."""


class CountMismatch(IndefEntropyError):
    """Polished zeros do not reproduce the total winding count."""


class ConditioningBreakdown(IndefEntropyError):
    """Determinant sequence lost conditioning before the requested index."""


class GenerationExhausted(IndefEntropyError):
    """Instance generator hit its rejection budget."""
