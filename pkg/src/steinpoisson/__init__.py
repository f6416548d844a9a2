"""Poisson approximation toolkit.

Stein-equation solutions for right-tail indicators, exact finite-support
laws for three indicator-sum models, size-bias couplings with exact jump
laws, local-dependence verification, and tail-ratio bound checking with
fitted constants.
"""

from .bound_checker import (
    TailRatioSup,
    bennett_hoeffding_check,
    coupling_bound_shape,
    local_bound_shape,
    ratio_experiment,
    tail_expectation_check,
    tail_ratio_sup,
    truncated_expectation_check,
)
from .dependence import (
    DependencyGraph,
    IndependenceReport,
    coloring_classes,
    independence_check,
    neighborhood_stats,
    singleton_graph,
    two_runs_graph,
    verify_coloring_independence,
)
from .exact_models import (
    DeltaConditionTable,
    ExactLaw,
    ExactModeLimitError,
    JointLaw2Runs,
    MatchingModel,
    PoissonBinomialModel,
    TwoRunsModel,
    binomial_law,
    delta_condition_2runs,
    derangements,
    law_tail,
    matching_law,
    pbt_law,
    pbt_leave_one_out,
    two_runs_enumerate,
    two_runs_joint,
    two_runs_law,
)
from .poisson_core import (
    PoissonLaw,
    difference_bound_series,
    verify_tail_inequalities,
)
from .report import BoundReport, ReportSet, reports_to_json, write_reports_csv
from .size_bias import (
    CouplingStats,
    DeltaLaw,
    RngStream,
    coupling_delta_law,
    matching_coupling_enumerate,
    matching_coupling_sample,
    pbt_coupling_delta_law,
    pbt_size_bias_law,
    size_bias_identity_check,
    total_variation_poisson,
    verify_tv_bound,
)
from .stein_kernel import (
    SteinSolution,
    forward_diff,
    g1,
    g1_exact,
    g1_envelope,
    stein_solution,
    verify_g1_bound,
    verify_solution,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CouplingStats",
    "DeltaConditionTable",
    "DeltaLaw",
    "DependencyGraph",
    "ExactLaw",
    "ExactModeLimitError",
    "IndependenceReport",
    "JointLaw2Runs",
    "MatchingModel",
    "PoissonBinomialModel",
    "PoissonLaw",
    "ReportSet",
    "RngStream",
    "SteinSolution",
    "TailRatioSup",
    "TwoRunsModel",
    "bennett_hoeffding_check",
    "binomial_law",
    "coloring_classes",
    "coupling_bound_shape",
    "coupling_delta_law",
    "delta_condition_2runs",
    "derangements",
    "difference_bound_series",
    "forward_diff",
    "g1",
    "g1_envelope",
    "g1_exact",
    "independence_check",
    "law_tail",
    "local_bound_shape",
    "matching_coupling_enumerate",
    "matching_coupling_sample",
    "matching_law",
    "neighborhood_stats",
    "pbt_coupling_delta_law",
    "pbt_law",
    "pbt_leave_one_out",
    "pbt_size_bias_law",
    "ratio_experiment",
    "reports_to_json",
    "singleton_graph",
    "size_bias_identity_check",
    "stein_solution",
    "tail_expectation_check",
    "tail_ratio_sup",
    "total_variation_poisson",
    "truncated_expectation_check",
    "two_runs_enumerate",
    "two_runs_graph",
    "two_runs_joint",
    "two_runs_law",
    "verify_coloring_independence",
    "verify_g1_bound",
    "verify_solution",
    "verify_tail_inequalities",
    "verify_tv_bound",
    "write_reports_csv",
]
