"""Exact wall structures, theta functions and mirror relations for log Calabi-Yau surfaces."""

from .algebra import (
    CLASSICAL,
    QUANTUM,
    AlgebraError,
    CurveClass,
    LatticeVector,
    Monomial,
    ScatteringPolynomial,
    anticanonical_degree,
    poly_mul,
    poly_pow_truncated,
    quantum_monomial_product,
)
from .geometry import (
    FanRay,
    GeometryError,
    Ray,
    ToricModel,
    Wall,
    WallStructure,
    build_initial_walls,
    cross_kink,
    cross_wall,
    path_crossings,
    perturb_walls,
    primitive_normal,
)
from .pipeline import PipelineConfig, run_pipeline
from .presets import dp4
from .quantum import (
    QuantumTheta,
    compute_quantum_theta_basis,
    find_quantum_relations,
    q_commutator,
    quantize,
    specialize_classical,
    transport_quantum_theta,
)
from .render import render_svg
from .scattering import (
    ScatteringError,
    check_consistency_at_point,
    complete_to_consistency,
    consistency_audit,
)
from .theta import (
    Relation,
    RelationError,
    ThetaFunction,
    compute_theta_basis,
    eliminate_theta4,
    find_relation,
    transport_theta,
)

__all__ = [
    "CLASSICAL",
    "QUANTUM",
    "AlgebraError",
    "CurveClass",
    "FanRay",
    "GeometryError",
    "LatticeVector",
    "Monomial",
    "PipelineConfig",
    "QuantumTheta",
    "Ray",
    "Relation",
    "RelationError",
    "ScatteringError",
    "ScatteringPolynomial",
    "ThetaFunction",
    "ToricModel",
    "Wall",
    "WallStructure",
    "anticanonical_degree",
    "build_initial_walls",
    "check_consistency_at_point",
    "complete_to_consistency",
    "compute_quantum_theta_basis",
    "compute_theta_basis",
    "consistency_audit",
    "cross_kink",
    "cross_wall",
    "dp4",
    "eliminate_theta4",
    "find_quantum_relations",
    "find_relation",
    "path_crossings",
    "perturb_walls",
    "poly_mul",
    "poly_pow_truncated",
    "primitive_normal",
    "q_commutator",
    "quantize",
    "quantum_monomial_product",
    "render_svg",
    "run_pipeline",
    "specialize_classical",
    "transport_quantum_theta",
    "transport_theta",
]
