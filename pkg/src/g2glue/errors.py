"""Exception hierarchy for g2glue."""

from typing import Optional


class G2GlueError(Exception):
    """Base class for every error raised by g2glue."""


class NotPositive(G2GlueError, ValueError):
    """A 3-form is not positive: its derived bilinear form is not definite."""


class DegenerateSpectrum(G2GlueError):
    """Eigenvalue clusters of a type-decomposition operator have the wrong sizes."""

    def __init__(self, message: str, clusters: Optional[list[int]] = None):
        super().__init__(message)
        self.clusters = clusters


class NoConvergence(G2GlueError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class JacobiViolation(G2GlueError, ValueError):
    """Structure constants fail the Jacobi identity or d∘d = 0."""


class MetricNotPositive(G2GlueError, ValueError):
    """A link metric is not symmetric positive-definite."""


class NoSolution(G2GlueError):
    """The nearly Kähler ansatz has no solution for this algebra and metric."""


class NKViolation(G2GlueError):
    """An SU(3) structure does not satisfy the nearly Kähler equations."""


class NotClosed(G2GlueError, ValueError):
    """A cone form expected to be closed is not."""


class RateOutOfRange(G2GlueError, ValueError):
    """A homogeneous order lies on the wrong side for the requested operation."""

    def __init__(self, message: str, order: Optional[float] = None):
        super().__init__(message)
        self.order = order


class LogObstruction(G2GlueError):
    """An operation would create or exceed the permitted log(r) power."""


class EndpointCritical(G2GlueError, ValueError):
    """An endpoint of a rate scan is itself a critical rate."""

    def __init__(self, message: str, endpoint: float):
        super().__init__(message)
        self.endpoint = endpoint


class UnexpectedKernel(G2GlueError):
    """A pencil has kernel inside an interval that should be excluded."""

    def __init__(self, message: str, rate: float, sigma: float):
        super().__init__(message)
        self.rate = rate
        self.sigma = sigma


class InadmissibleScale(G2GlueError, ValueError):
    """A gluing scale s violates sR' < s^γ < 2s^γ < ε."""

    def __init__(self, message: str, s: float):
        super().__init__(message)
        self.s = s


class NonPositiveValue(G2GlueError, ValueError):
    """A log-log fit received a non-positive value."""


class ConfigParse(G2GlueError, ValueError):
    """A configuration or link file could not be parsed or validated."""


class CheckFailure(G2GlueError):
    """A verification suite reported a failing check."""

    def __init__(self, message: str, check: str):
        super().__init__(message)
        self.check = check


class IoFailure(G2GlueError, OSError):
    """An artifact could not be written."""
