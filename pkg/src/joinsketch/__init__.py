"""Size estimation for join-projects and sparse boolean matrix products.

Given relations R1(a, b) and R2(b, c), estimates the number of distinct
(a, c) pairs in the projected join in expected linear time, using a
k-minimum-values sketch over a structured pair hash that enumerates
small-hash candidates without materializing the product.  Also provides
value-consistent per-relation samples whose join supports the same estimate
from pre-computed sketches, plus brute-force oracles for verification.
"""

from .estimator import (
    EXACT_SMALL,
    MODE_LINEAR,
    MODE_START_AT_ONE,
    POINT,
    THRESHOLD_MODES,
    UPPER_BOUND,
    ConfigError,
    Estimate,
    EstimatorConfig,
    WorkCounters,
    choose_threshold,
    estimate_median,
    median_by_value,
    run_once,
)
from .hashing import (
    FAMILIES,
    GRID,
    GRID_BITS,
    MASK64,
    MERSENNE,
    WRAPPING64,
    PairHash,
    PairwiseHash,
    draw_pair_hash,
    draw_single,
)
from .kmin import KMinState, SketchOutcome, combine
from .oracle import ExactResult, SizeCapError, exact_kth_hash, exact_size, exact_size_bitsets
from .relation import (
    EDGES,
    FIMI,
    FORMATS,
    MTX_PATTERN,
    Group,
    GroupedInput,
    ParseError,
    RangeError,
    Relation,
    Side,
    group_and_prune,
    load_relation,
    parse_relation,
    to_edges_text,
)
from .sampling import (
    DistinctSample,
    SampleEstimate,
    SampleFormatError,
    SampleSizePlan,
    beta_bound,
    draw_sample,
    estimate_from_samples,
    load_sample,
    plan_sample_size,
    save_sample,
    sufficient_sample_size,
    theoretical_epsilon,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DistinctSample",
    "EDGES",
    "EXACT_SMALL",
    "Estimate",
    "EstimatorConfig",
    "ExactResult",
    "FAMILIES",
    "FIMI",
    "FORMATS",
    "GRID",
    "GRID_BITS",
    "Group",
    "GroupedInput",
    "KMinState",
    "MASK64",
    "MERSENNE",
    "MODE_LINEAR",
    "MODE_START_AT_ONE",
    "MTX_PATTERN",
    "POINT",
    "PairHash",
    "PairwiseHash",
    "ParseError",
    "RangeError",
    "Relation",
    "SampleEstimate",
    "SampleFormatError",
    "SampleSizePlan",
    "Side",
    "SizeCapError",
    "SketchOutcome",
    "THRESHOLD_MODES",
    "UPPER_BOUND",
    "WRAPPING64",
    "WorkCounters",
    "beta_bound",
    "choose_threshold",
    "combine",
    "draw_pair_hash",
    "draw_sample",
    "draw_single",
    "estimate_from_samples",
    "estimate_median",
    "exact_kth_hash",
    "exact_size",
    "exact_size_bitsets",
    "group_and_prune",
    "load_relation",
    "load_sample",
    "median_by_value",
    "parse_relation",
    "plan_sample_size",
    "run_once",
    "save_sample",
    "sufficient_sample_size",
    "theoretical_epsilon",
    "to_edges_text",
]
