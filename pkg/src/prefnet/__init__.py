"""Preference-driven social networks: growth, spreading, patterns, fitting.

The pipeline in one breath: sample an age-structured population, score all
node pairs by connection preferences (feature level and feature
difference), keep the best-scoring encountered pairs as edges, run a
susceptible-infected process over the result, and compare the network's
structural patterns against targets. An optimizer closes the loop by
fitting preference weights to a target degree distribution.

All randomness derives from a single master seed through named streams,
so every result in the package is exactly reproducible.
"""

__version__ = "0.1.0"

from .scenario import (
    AgeShape,
    CounterStream,
    derive_stream,
    load_scenario,
    PH_FITTED,
    Preference,
    preset,
    PRESET_NAMES,
    RngPolicy,
    Rule,
    RULE_PREFERENCES,
    save_scenario,
    Scenario,
    ScenarioError,
    ScenarioParseError,
    ScenarioValidationError,
)
from .features import (
    group_counts,
    hill_number,
    hill_profile,
    make_population,
    Population,
    sample_ages,
)
from .netgen import (
    ba_target,
    edge_strength,
    generate_network,
    homophily_score,
    load_edge_list,
    NetworkSnapshot,
    node_traits,
    pair_score,
    PairScore,
    preferential_score,
    save_network,
    Traits,
)
from .netmetrics import (
    clustering_distribution,
    clustering_values,
    degree_distribution,
    js_divergence,
    PatternDistribution,
    shortest_path_lengths,
    shortest_path_matrix,
    summarize,
    SummaryStats,
)
from .epidemic import (
    EpidemicTrace,
    infection_by_distance,
    multi_source_distances,
    par,
    par_by_group,
    par_exact,
    par_matrix,
    risk_report,
    run_si,
    SeedRule,
    select_seeds,
    Susceptibility,
    transition_probability,
)
from .optimizer import (
    Candidate,
    evaluate,
    EvalRecord,
    optimize,
    OptimizeResult,
)

__all__ = [
    "__version__",
    "AgeShape",
    "ba_target",
    "Candidate",
    "clustering_distribution",
    "clustering_values",
    "CounterStream",
    "degree_distribution",
    "derive_stream",
    "edge_strength",
    "EpidemicTrace",
    "EvalRecord",
    "evaluate",
    "generate_network",
    "group_counts",
    "hill_number",
    "hill_profile",
    "homophily_score",
    "infection_by_distance",
    "js_divergence",
    "load_edge_list",
    "load_scenario",
    "make_population",
    "multi_source_distances",
    "NetworkSnapshot",
    "node_traits",
    "optimize",
    "OptimizeResult",
    "pair_score",
    "PairScore",
    "par",
    "par_by_group",
    "par_exact",
    "par_matrix",
    "PatternDistribution",
    "PH_FITTED",
    "Population",
    "Preference",
    "preferential_score",
    "preset",
    "PRESET_NAMES",
    "risk_report",
    "RngPolicy",
    "Rule",
    "RULE_PREFERENCES",
    "run_si",
    "sample_ages",
    "save_network",
    "save_scenario",
    "Scenario",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SeedRule",
    "select_seeds",
    "shortest_path_lengths",
    "shortest_path_matrix",
    "summarize",
    "SummaryStats",
    "Susceptibility",
    "Traits",
    "transition_probability",
]
