"""Exact performance analysis of stochastic matching models under first-come-first-matched.

Items of N classes arrive one at a time; an undirected non-bipartite
compatibility graph on the classes says who can match whom, and each
arrival matches the oldest compatible waiting item, if any. The package
computes the exact stationary metrics of this system (via dynamic
programming over the graph's independent sets), checks stability, designs
stabilizing arrival rates, evaluates the saturation limit, and ships a
simulator plus brute-force oracles that validate every formula.
"""

from ._chain import BACKEND as kernel_backend
from .analytics import (
    MetricsTable,
    StabilityReport,
    check_stability,
    compute_metrics,
    compute_psi,
    evaluate_pgf,
    load,
    lst_matching_time,
    mean_matching_times,
    mean_unmatched_per_class,
    mean_unmatched_total,
    pi_table,
    psi_general,
    waiting_probabilities,
)
from .errors import (
    DegenerateRatesError,
    GraphStructureError,
    InputFormatError,
    ResourceCapError,
    StabilityError,
)
from .graphs import (
    CompatibilityGraph,
    IndependentSetIndex,
    build_graph,
    classes_of,
    classify_graph,
    enumerate_independent_sets,
    mask_of,
)
from .heavy_traffic import (
    AsymptoticReport,
    ScalingSpec,
    asymptotic_metrics,
    check_assumption,
    convergence_sweep,
    scaled_rates,
)
from .heuristics import (
    OptimizationResult,
    degree_proportional_rates,
    minimize_max_load,
    restricted_minimize_max_load,
    weight_proportional_rates,
)
from .rates import RateVector
from .simulator import SimulationEstimates, simulate, simulate_replicated, step
from .validation import (
    TruncatedStateSpace,
    check_partial_balance,
    enumerate_states,
    product_form_measure,
    truncated_aggregate,
    truncated_partial_sums,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticReport",
    "CompatibilityGraph",
    "DegenerateRatesError",
    "GraphStructureError",
    "IndependentSetIndex",
    "InputFormatError",
    "MetricsTable",
    "OptimizationResult",
    "RateVector",
    "ResourceCapError",
    "ScalingSpec",
    "SimulationEstimates",
    "StabilityError",
    "StabilityReport",
    "TruncatedStateSpace",
    "asymptotic_metrics",
    "build_graph",
    "check_assumption",
    "check_partial_balance",
    "check_stability",
    "classes_of",
    "classify_graph",
    "compute_metrics",
    "compute_psi",
    "convergence_sweep",
    "degree_proportional_rates",
    "enumerate_independent_sets",
    "enumerate_states",
    "evaluate_pgf",
    "kernel_backend",
    "load",
    "lst_matching_time",
    "mask_of",
    "mean_matching_times",
    "mean_unmatched_per_class",
    "mean_unmatched_total",
    "minimize_max_load",
    "pi_table",
    "product_form_measure",
    "psi_general",
    "restricted_minimize_max_load",
    "scaled_rates",
    "simulate",
    "simulate_replicated",
    "step",
    "truncated_aggregate",
    "truncated_partial_sums",
    "waiting_probabilities",
    "weight_proportional_rates",
]
