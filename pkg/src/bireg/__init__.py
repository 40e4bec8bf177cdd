"""Random biregular bipartite graphs: uniform sampling, matching-threshold
experiments, closed-form probability oracles, and commutative layered graphs
with their magnification ratios."""

from .analytics import (
    CommutativeDegreeBounds,
    ProbabilityBound,
    ThresholdValue,
    commutative_d_bounds,
    disjoint_neighborhood_bounds,
    er_matching_prob,
    isolated_prob_asymptotic,
    matching_failure_bound,
    no_edge_exact,
    no_edge_upper,
    overlap_expectations,
    threshold_c,
)
from .experiments import (
    ObservableStats,
    SweepResult,
    SweepRow,
    TrialConfig,
    TrialResult,
    commutative_trial,
    er_baseline_sweep,
    estimate_local_statistics,
    run_matching_trial,
    sweep_matching,
    wilson_interval,
)
from .graph import (
    BipartiteDigraph,
    DegreeSummary,
    InducedSubgraph,
    LayeredGraph,
    apply_switching,
    block_cyclic_graph,
    circulant_graph,
    induce,
    min_degrees,
    neighborhood,
)
from .graphio import read_graph, write_graph, write_layered, write_results
from .matching import (
    Matching,
    ProblematicPair,
    find_problematic_pair,
    has_perfect_matching,
    max_matching,
)
from .params import GraphParams, validate_params
from .plunnecke import (
    CommutativityReport,
    MagnificationResult,
    build_random_layered,
    check_commutative,
    check_edge_condition,
    magnification_bruteforce,
    magnification_flow,
    plunnecke_monotone_check,
)
from .sampler import (
    SamplerMethod,
    enumerate_family,
    sample_graph,
    sample_pairing,
    sample_switch_chain,
    uniformity_chisq,
)
from .seeds import mix64, trial_seed

__version__ = "0.1.0"
