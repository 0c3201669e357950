"""Convex-hull analysis of sets cut out by three quadratic inequalities.

Given three real symmetric (n+1)x(n+1) matrices, the library studies the
determinant curve of the matrix pencil, certifies emptiness of the common
zero set, enumerates and classifies aggregated inequalities, reduces them to
small describing sets, and cross-checks the results against dense sampling.
"""

from .core import (
    Hyperplane,
    QuadraticTriple,
    Signature,
    eval_quadratic,
    pencil,
    points_at_infinity,
    restrict,
    sample_S,
    signature,
)
from .spectral import (
    CurveReport,
    HypCone,
    TrivariateForm,
    UniPoly,
    curve_report,
    depth,
    det_form,
    hyp_membership,
    is_hyperbolic,
    real_roots,
    restrict_line,
    smoothness_probe,
    spectral_polynomial,
)
from .cones import (
    Certificate,
    OmegaReport,
    PolyCone3,
    certify_system_empty,
    certify_variety_empty,
    dual,
    hyp_cone_containment,
    omega,
    pdlc_search,
    spectral_context,
)
from .aggregate import (
    AggregationLabel,
    ReductionResult,
    classify,
    improve_pdlc,
    is_redundant,
    lambda_membership,
    lambda_prime,
    pdlc_reduce,
    reduce,
    separating_aggregation,
)
from .verify import (
    Hull,
    HullReport,
    component_count_X,
    convex_hull,
    hull_check,
    regularity_probe,
)
from . import errors, gallery

__all__ = [
    "Hyperplane",
    "QuadraticTriple",
    "Signature",
    "eval_quadratic",
    "pencil",
    "points_at_infinity",
    "restrict",
    "sample_S",
    "signature",
    "CurveReport",
    "HypCone",
    "TrivariateForm",
    "UniPoly",
    "curve_report",
    "depth",
    "det_form",
    "hyp_membership",
    "is_hyperbolic",
    "real_roots",
    "restrict_line",
    "smoothness_probe",
    "spectral_polynomial",
    "Certificate",
    "OmegaReport",
    "PolyCone3",
    "certify_system_empty",
    "certify_variety_empty",
    "dual",
    "hyp_cone_containment",
    "omega",
    "pdlc_search",
    "spectral_context",
    "AggregationLabel",
    "ReductionResult",
    "classify",
    "improve_pdlc",
    "is_redundant",
    "lambda_membership",
    "lambda_prime",
    "pdlc_reduce",
    "reduce",
    "separating_aggregation",
    "Hull",
    "HullReport",
    "component_count_X",
    "convex_hull",
    "hull_check",
    "regularity_probe",
    "errors",
    "gallery",
]
