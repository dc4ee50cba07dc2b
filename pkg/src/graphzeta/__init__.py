"""Ihara zeta functions of finite graphs, voltage bundles, and covering towers."""

__version__ = "0.1.0"

from .graphs import (
    CoveringMap,
    GraphAutomorphism,
    HalfEdgeGraph,
    MarkedGraph,
    ResourceLimitError,
    ValidationError,
    adjacency_matrix,
    ball,
    degree_matrix_q,
    marked_distance,
    marked_isometric,
    validate_covering,
)
from .polynomials import IntPolynomial
from .zeta import (
    CycleClass,
    ZetaRational,
    closed_geodesic_counts,
    evaluate_zeta_inverse,
    hashimoto_matrix,
    log_zeta_series,
    primitive_cycle_oracle,
    zeta_inverse,
)
