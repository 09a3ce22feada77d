"""Branch-point knots of perturbed branched disks in four-space.

The package models a branched disk (w^N, h(w)) perturbed to an immersion,
finds its double points, builds a loop in the base plane around the branch
point image with a detour per double point, traces the N-strand braid over
that loop, and certifies the resulting word against its two-block-plus-
bands form.
"""

from .braids import (
    BandRepresentation,
    BraidWord,
    alexander_of_closure,
    band_representation_matches,
    cyclically_equal,
    require_band_match,
    torus_alexander,
)
from .config import RunConfig, format_config, load_config, parse_config, save_config
from .doublepoints import (
    DoublePoint,
    GenericityReport,
    SheetPairing,
    SolverConfig,
    check_genericity,
    double_point_sign,
    find_double_points,
    gamma_retry_schedule,
    holomorphic_oracle,
    oracle_pairs,
    pair_mismatch,
)
from .errors import (
    BlockStructureFailure,
    BranchKnotError,
    ConstructionFailure,
    DoublePointOnLoop,
    GenericityFailure,
    LiftAmbiguity,
    NonConvergence,
    NonUnitRemainder,
    NotAKnot,
    ParseError,
    PreconditionViolated,
    StrandMismatch,
    TangencyDetected,
    TemplateMismatch,
    ValidationError,
    ZeroFiber,
)
from .laurent import LaurentPolynomial
from .locus import (
    TripleCoincidence,
    coincidence_value,
    find_triple_coincidences,
    path_locus_intersections,
    sample_locus,
)
from .loop import (
    BaseLoop,
    LoopConfig,
    LoopPath,
    build_loop,
    circle_locus_hits,
    parametrize_loop,
    validate_loop,
)
from .pipeline import PipelineResult, build_report, run_pipeline, serialize_report
from .surface import (
    BranchedDiskModel,
    Monomial,
    PerturbationParams,
    Point4,
    eval_F,
    eval_h,
    eval_height_coord,
    lift_fiber,
)
from .trace import (
    BraidStructure,
    CrossingEvent,
    TraceConfig,
    TracedBraid,
    classify_events,
    extract_band_representation,
    trace_braid,
)

__version__ = "0.1.0"

__all__ = [
    "BandRepresentation",
    "BaseLoop",
    "BlockStructureFailure",
    "BraidStructure",
    "BraidWord",
    "BranchKnotError",
    "BranchedDiskModel",
    "ConstructionFailure",
    "CrossingEvent",
    "DoublePoint",
    "DoublePointOnLoop",
    "GenericityFailure",
    "GenericityReport",
    "LaurentPolynomial",
    "LiftAmbiguity",
    "LoopConfig",
    "LoopPath",
    "Monomial",
    "NonConvergence",
    "NonUnitRemainder",
    "NotAKnot",
    "ParseError",
    "PerturbationParams",
    "PipelineResult",
    "Point4",
    "PreconditionViolated",
    "RunConfig",
    "SheetPairing",
    "SolverConfig",
    "StrandMismatch",
    "TangencyDetected",
    "TemplateMismatch",
    "TraceConfig",
    "TracedBraid",
    "TripleCoincidence",
    "ValidationError",
    "ZeroFiber",
    "alexander_of_closure",
    "band_representation_matches",
    "build_loop",
    "build_report",
    "check_genericity",
    "circle_locus_hits",
    "classify_events",
    "coincidence_value",
    "cyclically_equal",
    "double_point_sign",
    "eval_F",
    "eval_h",
    "eval_height_coord",
    "extract_band_representation",
    "find_double_points",
    "find_triple_coincidences",
    "format_config",
    "gamma_retry_schedule",
    "holomorphic_oracle",
    "lift_fiber",
    "load_config",
    "oracle_pairs",
    "pair_mismatch",
    "parametrize_loop",
    "parse_config",
    "path_locus_intersections",
    "require_band_match",
    "run_pipeline",
    "sample_locus",
    "save_config",
    "serialize_report",
    "torus_alexander",
    "trace_braid",
    "validate_loop",
]
