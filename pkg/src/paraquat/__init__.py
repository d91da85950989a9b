"""Numerical verification of paraquaternionic structures on neutral charts.

The package builds metrics, basis triples and maps as plain component
callables on coordinate boxes, differentiates them by central finite
differences, and checks the defining identities at deterministic sample
points: the tau-algebra of a triple, compatibility with a metric, the
span-parallel ("PQK") condition and its connection 1-forms, almost product
structures, semi-Riemannian submersions with their fundamental tensors, and
the lifted geometry on a tangent bundle.  ``paraquat.scenario`` bundles the
checks into JSON-driven scenarios; the ``paraquat-verify`` script runs them.
"""

from ._version import __version__
from .algebra import (
    CYCLIC,
    TAU,
    AlgebraReport,
    AtlasPatch,
    AtlasTransition,
    LocalBasisTriple,
    SplitQuaternion,
    StructureAtlas,
    TransitionMap,
    apply_transition,
    check_atlas,
    check_transition,
    check_triple_algebra,
    frobenius_gram,
    overlap_box,
    represent,
    span_gap,
    splitq_mul,
)
from .connection import (
    MetricField,
    christoffel,
    covariant_derivative_02,
    covariant_derivative_11,
    covariant_derivative_vector,
    curvature_operator,
    is_flat,
    lie_bracket,
    nijenhuis,
    riemann,
    signature,
)
from .errors import (
    DegenerateFiberMetricError,
    DegenerateMetricError,
    EmptyDomainError,
    EvaluationError,
    ExprSyntaxError,
    IllConditionedError,
    NotAFiberError,
    OutOfDomainError,
    ParaquatError,
    ParseError,
    PreconditionFailedError,
    RankDeficientError,
    ShapeError,
    SingularTransitionError,
    StencilOutOfDomainError,
    UnknownSymbolError,
    ValidationError,
)
from .exprlang import bind_expr, evaluate, free_symbols, parse_expr, print_expr
from .fields import (
    FdConfig,
    ManifoldSpec,
    Point,
    TensorField,
    constant_field,
    eval_field,
    fd_partial,
    sample_points,
)
from .sasaki import (
    BracketReport,
    LiftFrame,
    SasakiBundle,
    build_tangent_bundle,
    check_bracket,
    check_connection_oracle,
    check_nabla_j_oracle,
    check_structure_derivative_span,
    connection_shift,
    horizontal_lift,
    lift_frame,
    lifted_field,
    oracle_tilde_nabla,
    oracle_tilde_nabla_J,
    tangent_bundle_chart,
    vertical_lift,
)
from .scenario import (
    CHECKS,
    VerificationReport,
    build_context,
    load_scenario,
    run_scenario,
)
from .structures import (
    KahlerFit,
    ProductStructureField,
    StructureClass,
    StructureVerdict,
    check_hermitian,
    check_parallel_equivalence,
    check_product_structure,
    check_sigma_invariant_operator,
    classify_structure,
    fit_kahler_oneforms,
)
from .submersion import (
    ONeillTensors,
    SubmersionMap,
    basic_lift,
    check_paraholomorphic,
    check_semi_riemannian,
    check_vh_invariance,
    descend_one_forms,
    jacobian,
    oneill_tensors,
    vh_split,
)

__all__ = [
    "AlgebraReport",
    "AtlasPatch",
    "AtlasTransition",
    "BracketReport",
    "CHECKS",
    "CYCLIC",
    "DegenerateFiberMetricError",
    "DegenerateMetricError",
    "EmptyDomainError",
    "EvaluationError",
    "ExprSyntaxError",
    "FdConfig",
    "IllConditionedError",
    "KahlerFit",
    "LiftFrame",
    "LocalBasisTriple",
    "ManifoldSpec",
    "MetricField",
    "NotAFiberError",
    "ONeillTensors",
    "OutOfDomainError",
    "ParaquatError",
    "ParseError",
    "Point",
    "PreconditionFailedError",
    "ProductStructureField",
    "RankDeficientError",
    "SasakiBundle",
    "ShapeError",
    "SingularTransitionError",
    "SplitQuaternion",
    "StencilOutOfDomainError",
    "StructureAtlas",
    "StructureClass",
    "StructureVerdict",
    "SubmersionMap",
    "TAU",
    "TensorField",
    "TransitionMap",
    "UnknownSymbolError",
    "ValidationError",
    "VerificationReport",
    "__version__",
    "apply_transition",
    "basic_lift",
    "bind_expr",
    "build_context",
    "build_tangent_bundle",
    "check_atlas",
    "check_bracket",
    "check_connection_oracle",
    "check_hermitian",
    "check_nabla_j_oracle",
    "check_paraholomorphic",
    "check_parallel_equivalence",
    "check_product_structure",
    "check_semi_riemannian",
    "check_sigma_invariant_operator",
    "check_structure_derivative_span",
    "check_transition",
    "check_triple_algebra",
    "check_vh_invariance",
    "christoffel",
    "classify_structure",
    "connection_shift",
    "constant_field",
    "covariant_derivative_02",
    "covariant_derivative_11",
    "covariant_derivative_vector",
    "curvature_operator",
    "descend_one_forms",
    "eval_field",
    "evaluate",
    "fd_partial",
    "fit_kahler_oneforms",
    "free_symbols",
    "frobenius_gram",
    "horizontal_lift",
    "is_flat",
    "jacobian",
    "lie_bracket",
    "lift_frame",
    "lifted_field",
    "load_scenario",
    "nijenhuis",
    "oneill_tensors",
    "oracle_tilde_nabla",
    "oracle_tilde_nabla_J",
    "overlap_box",
    "parse_expr",
    "print_expr",
    "represent",
    "riemann",
    "run_scenario",
    "sample_points",
    "signature",
    "span_gap",
    "splitq_mul",
    "tangent_bundle_chart",
    "vertical_lift",
    "vh_split",
]
