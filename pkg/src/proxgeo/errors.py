"""Exception hierarchy shared by every module."""


class ProxGeoError(Exception):
    """Base class for all library errors."""


class DomainError(ProxGeoError, ValueError):
    pass


class SizeMismatch(ProxGeoError, ValueError):
    pass


class PartitionMismatch(ProxGeoError, ValueError):
    pass


class ZeroLength(ProxGeoError, ValueError):
    pass


class ChordTooLong(ProxGeoError, ValueError):
    pass


class DegenerateChord(ProxGeoError, ValueError):
    pass


class BadDirection(ProxGeoError, ValueError):
    pass


class DegenerateRadialDirection(ProxGeoError, ValueError):
    pass


class InvalidSet(ProxGeoError, ValueError):
    """Set specification is malformed or claims an impossible radius."""


class AmbiguousProjection(ProxGeoError):
    """The point is (numerically) equidistant from two parts of the set."""


class OutsideReach(ProxGeoError):
    """The point lies at distance >= R from the set."""


class SolverDiverged(ProxGeoError):
    pass


class EndpointsNotInSet(ProxGeoError, ValueError):
    pass


class RootNotBracketed(ProxGeoError):
    """Slice-projection root search failed; the claimed radius is suspect."""


class TemplateNotOnArc(ProxGeoError, ValueError):
    pass


class ProjectionFailed(ProxGeoError):
    pass


class EnergyIncreased(ProxGeoError):
    """Internal invariant violation: a descent sweep raised the energy."""


class PointsTooFarApart(ProxGeoError, ValueError):
    pass


class MeshTooCoarse(ProxGeoError, ValueError):
    pass


class PointsTooFar(ProxGeoError, ValueError):
    """Endpoints at distance >= 2R; no guarantee of connectivity."""


class NotReachable(ProxGeoError):
    pass


class DegenerateEndpoints(ProxGeoError, ValueError):
    pass


class LipschitzViolated(ProxGeoError, ValueError):
    pass


class PreconditionFailed(ProxGeoError, ValueError):
    pass


class GraphDisconnected(ProxGeoError):
    pass


class UnsupportedVariant(ProxGeoError, ValueError):
    pass


class ConfigInvalid(ProxGeoError, ValueError):
    pass


class BadIndices(ProxGeoError, ValueError):
    pass
