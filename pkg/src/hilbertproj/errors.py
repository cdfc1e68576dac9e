"""Exception hierarchy for hilbertproj.

Every error raised on purpose by the library derives from
:class:`GeometryError`, which is itself a :class:`ValueError` so callers that
only care about bad input can catch the builtin.
"""


class GeometryError(ValueError):
    """Base class for all library errors."""


class DimensionMismatch(GeometryError):
    pass


class KernelPoint(GeometryError):
    """A point lies (numerically) in the kernel of a linear map."""


class NotCollinear(GeometryError):
    pass


class DegenerateConfiguration(GeometryError):
    pass


class NotConverged(GeometryError):
    pass


class NotInterior(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class NotProper(GeometryError):
    """Metric operations were asked to act on a non-proper convex set."""


class NotInCone(GeometryError):
    pass


class ImageEscapes(GeometryError):
    pass


class NotAutomorphism(GeometryError):
    pass


class Exploded(GeometryError):
    """Orbit enumeration exceeded its point budget."""


class NoConsistentSign(GeometryError):
    pass


class SplitUnverified(GeometryError):
    """An invariant splitting was found but the cone does not split along it."""


class NotComparable(GeometryError):
    pass


class KernelNotInvariant(GeometryError):
    pass


class NoComplement(GeometryError):
    pass


class InconsistentBoundaryData(GeometryError):
    pass


class NotInSpace(GeometryError):
    pass


class UnknownScene(GeometryError):
    pass


class UnknownSuite(GeometryError):
    pass


class SceneIncompatible(GeometryError):
    pass
