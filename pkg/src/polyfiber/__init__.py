"""polyfiber: real-fiber curves, complex roots, and 3D lifts for real polynomials.

Given a polynomial f with real coefficients, this package computes the subset
of the complex plane where f takes real values (the zero set of
Q(x, y) = Im f(x + iy)), lifts those curves into 3D as (x, y, f-value),
finds every complex root with multiplicity, and slices the lifted graph with
horizontal planes so the count of intersections always equals the degree.
"""

from .polynomial import (
    BivariatePoly,
    DegreeError,
    EvaluationError,
    MAX_PARSE_DEGREE,
    RealPolynomial,
    ReducedImagPoly,
    derivative,
    eval_complex,
    expand_real_imag,
    format_number,
    parse_coeffs,
    parse_poly_string,
    reduce_imag,
)
from .locus import (
    BranchKind,
    CubicClassification,
    FULL_LINE,
    FullLine,
    LocusBranch,
    SlopeCategory,
    SpaceCurve,
    classify_cubic,
    closed_form_locus,
    cubic_conic_is_degenerate,
    cubic_hyperbola_check,
    lift_branches,
    lift_to_space,
    solve_offaxis_at,
    sweep_locus,
)
from .rootfind import (
    ConvergenceError,
    RootInfo,
    SliceResult,
    find_roots,
    slice_at,
    verify_roots_on_locus,
)
from .scene import (
    ProvenanceError,
    Scene,
    SceneFormatError,
    build_scene,
    compute_scene,
    from_scene_file,
    to_csv,
    to_scene_file,
)
from .geogebra import to_geogebra

__version__ = "0.1.0"

__all__ = [
    "BivariatePoly",
    "BranchKind",
    "ConvergenceError",
    "CubicClassification",
    "DegreeError",
    "EvaluationError",
    "FULL_LINE",
    "FullLine",
    "LocusBranch",
    "MAX_PARSE_DEGREE",
    "ProvenanceError",
    "RealPolynomial",
    "ReducedImagPoly",
    "RootInfo",
    "Scene",
    "SceneFormatError",
    "SliceResult",
    "SlopeCategory",
    "SpaceCurve",
    "build_scene",
    "classify_cubic",
    "closed_form_locus",
    "compute_scene",
    "cubic_conic_is_degenerate",
    "cubic_hyperbola_check",
    "derivative",
    "eval_complex",
    "expand_real_imag",
    "find_roots",
    "format_number",
    "from_scene_file",
    "lift_branches",
    "lift_to_space",
    "parse_coeffs",
    "parse_poly_string",
    "reduce_imag",
    "slice_at",
    "solve_offaxis_at",
    "sweep_locus",
    "to_csv",
    "to_geogebra",
    "to_scene_file",
    "verify_roots_on_locus",
]
