"""Cremona equivalence of plane curves through weighted clusters."""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .cluster import (
    Certificate, ClusterPoint, DiscrepancyReport, PlanePair, ValidationReport, WeightedCluster,
    classify_singularities, combinatorial_genus, jung_test, log_discrepancies,
    noether_fano_certificate, point, validate_cluster, validate_plane_pair,
)
from .coolidge import km_empty_test, line_equivalent
from .document import DocumentError, canonical_json, pair_document, parse_document
from .errors import CremonaError, InputError, InvariantViolation, ReplayError
from .hirzebruch import (
    Move, RuledPair, StandardModel, adjoint, elm, enumerate_standard_models, replay,
    standard_model, validate_pair,
)
from .minimality import is_minimal_degree, minimal_plane_model, planar_system_degree, resolve_along_c0
from .report import emit_report
from .threefold import ProjectionPair, ci_projection_certificate, scroll_trace

__all__ = [
    "__version__", "BACKEND",
    "Certificate", "ClusterPoint", "DiscrepancyReport", "PlanePair", "ValidationReport",
    "WeightedCluster", "classify_singularities", "combinatorial_genus", "jung_test",
    "log_discrepancies", "noether_fano_certificate", "point", "validate_cluster",
    "validate_plane_pair", "km_empty_test", "line_equivalent", "DocumentError",
    "canonical_json", "pair_document", "parse_document", "CremonaError", "InputError",
    "InvariantViolation", "ReplayError", "Move", "RuledPair", "StandardModel", "adjoint",
    "elm", "enumerate_standard_models", "replay", "standard_model", "validate_pair",
    "is_minimal_degree", "minimal_plane_model", "planar_system_degree", "resolve_along_c0",
    "emit_report", "ProjectionPair", "ci_projection_certificate", "scroll_trace",
]
