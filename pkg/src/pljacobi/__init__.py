"""Piecewise linear Jacobi sets of function pairs and 1-form pairs.

The Jacobi set of two functions (or two 1-forms) on a triangulated 2- or
3-manifold is the set of mesh edges on which the combination F + lambda G
can vanish while the edge is critical for it; it approximates the smooth
locus where the two gradients / forms are linearly dependent.

Typical flow: build or load a :class:`SimplicialComplex`, produce two
discrete 1-forms (coboundary, midpoint rule or edge quadrature), call
:func:`jacobi_set` (or :func:`jacobi_set_functions` for vertex functions),
then validate against the smooth determinant contour from :mod:`.oracle`.
"""

from .errors import (
    BoundaryEdgeError,
    DimensionUnsupportedError,
    EmptyContourError,
    FormFormatError,
    MeshFormatError,
    MissingEdgeValueError,
    NonManifoldError,
    PLJacobiError,
    SampleMissingError,
    StepTooLargeError,
    ZeroLinkValueError,
)
from .forms import (
    AnalyticForm,
    OneForm,
    ScalarField,
    VectorSampleGrid,
    coboundary,
    discretize_midpoint,
    discretize_quadrature,
    read_one_form,
    read_scalar_field,
    read_vector_samples,
    write_one_form,
    write_scalar_field,
    write_vector_samples,
)
from .jacobi import (
    DegreeReport,
    EdgeTestResult,
    JacobiDiagnostics,
    JacobiSet,
    degree_report,
    edge_multiplicity_2d,
    edge_multiplicity_3d,
    edge_test,
    jacobi_set,
    jacobi_set_functions,
    lambda_star,
    link_height,
    multiplicity_from_link_signs,
    read_jacobi_csv,
    write_jacobi_csv,
    write_report,
)
from .mesh import (
    EdgeLink,
    SimplicialComplex,
    build_complex,
    edge_link,
    generate_grid,
    read_mesh,
    write_mesh,
)
from .oracle import (
    AnalyticFormPair,
    ContourSet,
    DistanceReport,
    builtin_pair,
    determinant_field,
    distance_report,
    fig2_functions,
    marching_squares,
    read_contour_csv,
    write_contour_csv,
)
from .plotting import ExportStyle, export_overlay_svg, export_svg, render_overlay

__version__ = "0.1.0"

__all__ = [
    "AnalyticForm",
    "AnalyticFormPair",
    "BoundaryEdgeError",
    "ContourSet",
    "DegreeReport",
    "DimensionUnsupportedError",
    "DistanceReport",
    "EdgeLink",
    "EdgeTestResult",
    "EmptyContourError",
    "ExportStyle",
    "FormFormatError",
    "JacobiDiagnostics",
    "JacobiSet",
    "MeshFormatError",
    "MissingEdgeValueError",
    "NonManifoldError",
    "OneForm",
    "PLJacobiError",
    "SampleMissingError",
    "ScalarField",
    "SimplicialComplex",
    "StepTooLargeError",
    "VectorSampleGrid",
    "ZeroLinkValueError",
    "build_complex",
    "builtin_pair",
    "coboundary",
    "degree_report",
    "determinant_field",
    "discretize_midpoint",
    "discretize_quadrature",
    "distance_report",
    "edge_link",
    "edge_multiplicity_2d",
    "edge_multiplicity_3d",
    "edge_test",
    "export_overlay_svg",
    "export_svg",
    "fig2_functions",
    "generate_grid",
    "jacobi_set",
    "jacobi_set_functions",
    "lambda_star",
    "link_height",
    "marching_squares",
    "multiplicity_from_link_signs",
    "read_contour_csv",
    "read_jacobi_csv",
    "read_mesh",
    "read_one_form",
    "read_scalar_field",
    "read_vector_samples",
    "render_overlay",
    "write_contour_csv",
    "write_jacobi_csv",
    "write_mesh",
    "write_one_form",
    "write_report",
    "write_scalar_field",
    "write_vector_samples",
]
