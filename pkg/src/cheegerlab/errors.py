"""Exception taxonomy for cheegerlab.

Errors are grouped by origin so the CLI can map them to exit codes:
input problems (bad polygons, bad requests), assumption failures
(neck detected), and numerical failures (lost brackets, oversized grids).
"""


class CheegerlabError(Exception):
    """Base class for all library errors."""


class InputError(CheegerlabError):
    """Invalid input data or request parameters."""


class TooFewVerticesError(InputError):
    """Polygon needs at least three vertices."""


class SelfIntersectingError(InputError):
    """Polygon boundary crosses itself."""


class DegenerateAreaError(InputError):
    """Polygon encloses (numerically) zero area."""


class RadiusExceedsInradiusError(InputError):
    """Erosion radius larger than the inradius of the domain."""


class KappaBelowInverseInradiusError(InputError):
    """Curvature below 1/R; no admissible free-boundary radius exists."""


class VolumeOutOfRangeError(InputError):
    """Requested volume outside the valid profile range."""


class VolumeBelowInballError(VolumeOutOfRangeError):
    """Requested volume below the inball volume pi*R^2."""


class GridTooLargeError(InputError):
    """Rasterization would exceed the configured pixel budget."""


class AssumptionError(CheegerlabError):
    """A structural hypothesis required by the solver does not hold."""


class NeckDetectedError(AssumptionError):
    """Domain fails the no-neck check; rolled-set machinery is invalid."""


class NumericalError(CheegerlabError):
    """A numerical routine could not complete reliably."""


class OpenChainError(NumericalError):
    """Arc-polygon boundary chain does not close up."""


class EmptyInnerBodyError(NumericalError):
    """Erosion unexpectedly produced an empty region."""


class EmptyProfileError(NumericalError):
    """Profile construction produced no usable sample points."""


class RootNotBracketedError(NumericalError):
    """Root finder could not bracket a sign change."""


class NoSignChangeError(RootNotBracketedError):
    """Bisection target never changes sign on the search interval."""
