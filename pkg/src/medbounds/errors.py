"""Exception types shared across the package."""


class MedboundsError(Exception):
    """Base class for every error raised by this package."""


class EmptyArm(MedboundsError):
    """A treatment arm carries zero total count or probability mass."""


class UndefinedConditional(MedboundsError):
    """A conditional probability is required but its conditioning event has
    probability zero, and the requested quantity actually depends on it."""


class EmptyIntersection(MedboundsError):
    """Two intervals fail to overlap beyond numerical tolerance."""


class UnsupportedEstimand(MedboundsError):
    """The requested estimand is not available for the requested operation."""


class Infeasible(MedboundsError):
    """A linear program has no feasible point."""


class Unbounded(MedboundsError):
    """A linear program is unbounded in the optimization direction."""


class DimensionMismatch(MedboundsError):
    """Distribution and constraint system belong to different settings."""


class SymbolMismatch(MedboundsError):
    """Expression symbols do not match the distribution's setting."""


class ResourceExhausted(MedboundsError):
    """A configured enumeration budget was exceeded.

    Carries a ``progress`` dict describing how far the computation got, so
    callers can report partial state.
    """

    def __init__(self, message: str, progress: dict | None = None):
        super().__init__(message)
        self.progress = dict(progress or {})
