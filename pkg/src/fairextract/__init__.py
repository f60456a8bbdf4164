"""Fairness-oracle extraction: oracles, extraction algorithms and verifiers."""
from .classifier import (
    Classifier,
    PairCost,
    QuadrantSizes,
    Universe,
    flip,
    hamming,
    in_close_alignment,
    is_balanced,
    is_faithful,
    merge_ones,
    merge_zeros,
    quadrant_sizes,
    quadrants,
    symmetric_cost,
    transport_cost,
)
from .extraction import (
    OrbitFamily,
    SharpOutput,
    check_situation_a,
    fuzzy_extract,
    hamming_extract,
    sharp_extract,
    strong_extract,
    symmetric_extract,
    verify_fuzzy,
    verify_theorem2,
)
from .generate import gen_instance
from .metric import CoarseMetric, ThresholdStack, coarse_metric, combine_thresholds, threshold_family
from .oracle import (
    DistanceKind,
    GrayKind,
    GrayPolicy,
    OracleSpec,
    QueryHandle,
    check_assumptions,
    enumerate_accepted,
    ground_truth_orbits,
    neighborhood,
    query,
)

__version__ = "0.1.0"
