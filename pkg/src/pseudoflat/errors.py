"""Exception hierarchy shared by the pseudoflat modules."""


class PseudoflatError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(PseudoflatError, ValueError):
    """Invalid geometric input."""


class OutOfCube(GeometryError):
    pass


class OnBoundary(GeometryError):
    """A point lies on a cell wall; the point set must be re-jittered."""


class NoParent(GeometryError):
    pass


class NotDyadic(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class CollinearPoints(GeometryError):
    pass


class EqualSurfaces(GeometryError):
    pass


class UnsupportedFlat(GeometryError):
    """The operation has no implementation for this flat kind or dimension."""


class UnparametrizableFlat(GeometryError):
    pass


class DuplicateFlat(GeometryError):
    pass


class PointNotOnSurface(GeometryError):
    pass


class NotSameCell(GeometryError):
    pass


class NoDefiningTupleAtLevel0(PseudoflatError):
    """The surface violates the defining-tuple hypothesis; the instance is rejected."""


class SubsetCapExceeded(PseudoflatError):
    pass


class HomogeneityError(PseudoflatError):
    pass


class InsufficientData(PseudoflatError, ValueError):
    pass


class ConfigError(PseudoflatError):
    pass


class EmitError(PseudoflatError, OSError):
    """Writing an output file failed; the message carries the path."""


class IncidenceMismatch(PseudoflatError):
    """Two incidence scans of the same family disagree."""
