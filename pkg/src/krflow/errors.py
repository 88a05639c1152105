"""Exception types shared across the package."""

from __future__ import annotations


class KrflowError(Exception):
    """Base class for all package errors."""


class MetricDegenerate(KrflowError):
    """A metric eigenvalue is zero or negative."""


class GridTooCoarse(KrflowError):
    """Grid has fewer nodes than the supported minimum."""


class GridMismatch(KrflowError):
    """A field does not live on its parent state's grid."""


class BoundaryNode(KrflowError):
    """Pointwise curvature requested too close to the grid boundary."""


class DimensionTooSmall(KrflowError):
    """Operation requires complex dimension at least 2."""


class NonHermitian(KrflowError):
    """Assembled operator failed its hermiticity check."""


class StepRejected(KrflowError):
    """A flow step would violate metric positivity."""


class TrajectoryTooShort(KrflowError):
    """Operation needs at least two stored states."""


class NonIntegrable(KrflowError):
    """Integrand does not decay at the far boundary of the grid."""


class NormalizationViolated(KrflowError):
    """Test density does not satisfy its normalization constraint."""


class NotConverged(KrflowError):
    """Iterative minimization stopped before reaching its criterion."""


class NoAdmissiblePoints(KrflowError):
    """No blow-up points satisfy the selection condition at this resolution."""


class WindowOutOfRange(KrflowError):
    """Requested rescaling window is not covered by the trajectory."""


class ChainDomainExceeded(KrflowError):
    """Rescaled time parameter reached the end of its domain."""


class PullbackOutOfRange(KrflowError):
    """Gradient-flow map left the computational grid."""


class ConfigInvalid(KrflowError):
    """Scenario configuration failed validation."""
