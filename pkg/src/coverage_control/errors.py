"""Exception types shared across the toolkit."""


class CoverageControlError(Exception):
    """Base class for all toolkit errors."""


class InvalidDomain(CoverageControlError):
    """Domain polygon is degenerate, nonconvex, or not counterclockwise."""


class PositionOutsideDomain(CoverageControlError):
    """A robot position lies outside (or on the boundary of) the domain."""


class CoincidentRobots(CoverageControlError):
    """Two robots are closer than the separation threshold; bisectors are meaningless."""


class IndexOutOfRange(CoverageControlError, IndexError):
    """Robot index outside [0, n)."""


class EmptyPolygon(CoverageControlError):
    """Integration requested over an empty polygon."""


class DegenerateSegment(CoverageControlError):
    """Line integral requested over a zero-length segment."""


class UnknownDensity(CoverageControlError, KeyError):
    """Requested builtin density name does not exist."""


class NotAdjacent(CoverageControlError):
    """Jacobian block requested for a non-adjacent robot pair (zero by sparsity)."""


class EigensolveFailure(CoverageControlError):
    """Eigenvalue computation did not converge; spectral radius unknown."""


class SingularSystem(CoverageControlError):
    """I - dc/dp is numerically singular or too ill-conditioned to trust."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ScenarioError(CoverageControlError):
    """Scenario file failed schema validation. Carries the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
