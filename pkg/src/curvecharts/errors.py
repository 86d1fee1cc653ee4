"""Exception hierarchy shared across the package."""


class CurveChartsError(Exception):
    """Base class for all errors raised by curvecharts."""


class CutLocusError(CurveChartsError):
    """Logarithm requested across (or too close to) the cut locus."""


class NotEmbeddingError(CurveChartsError):
    """Curve fails the immersion or self-separation test."""


class DegenerateFrameError(CurveChartsError):
    """Normal frame construction failed."""


class OutsideDomainError(CurveChartsError):
    """Section exceeds the chart validity radius."""


class OutsideTubeError(CurveChartsError):
    """Curve leaves the tubular neighborhood of the chart center."""


class ProjectionFailedError(CurveChartsError):
    """Fiber projection root-find did not converge."""


class NonMonotoneError(CurveChartsError):
    """Fiber assignment is not an orientation-preserving circle diffeomorphism."""


class UnsupportedAmbientError(CurveChartsError):
    """Functional term not defined on this ambient space."""


class LineSearchFailedError(CurveChartsError):
    """No Armijo step above the minimum step length."""


class ChartBreakdownError(CurveChartsError):
    """Re-centered curve is not a valid chart center."""


class SingularSystemError(CurveChartsError):
    """Newton system singular beyond kernel regularization."""
