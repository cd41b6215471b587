"""Exception hierarchy shared by all pljacobi modules."""


class PLJacobiError(Exception):
    """Base class for all errors raised by this package."""


class MeshFormatError(PLJacobiError):
    """A mesh file or cell array is malformed."""


class NonManifoldError(PLJacobiError):
    """A codimension-1 face is shared by more than two top cells, or an
    interior edge link does not close up into a single cycle."""


class BoundaryEdgeError(PLJacobiError):
    """An operation that requires an interior edge was given a boundary edge."""


class StepTooLargeError(PLJacobiError):
    """Grid step leaves fewer than two cells along an axis."""


class FormFormatError(PLJacobiError):
    """A field/form file is malformed or inconsistent with its mesh."""


class MissingEdgeValueError(FormFormatError):
    """A 1-form file does not cover every edge of the mesh it is bound to."""


class SampleMissingError(PLJacobiError):
    """A mesh vertex has no usable sample in a vector sample grid."""


class DimensionUnsupportedError(PLJacobiError):
    """Jacobi-set tests are only defined here for 2- and 3-complexes."""


class ZeroLinkValueError(PLJacobiError, ValueError):
    """A link vertex sits exactly at height zero and tie-breaking is disabled."""


class EmptyContourError(PLJacobiError):
    """Distance statistics were requested against an empty contour."""
