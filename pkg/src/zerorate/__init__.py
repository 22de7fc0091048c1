"""Zero-rate reliability analysis for mismatched decoding.

The package models a channel together with the (possibly different)
metric its decoder maximizes, decides the zero-error questions exactly
in rational arithmetic, and computes the zero-rate exponent quantity
with certified bounds when only bounds are available.  Codebook tools
(pairwise tilted distances, near-regular subcode extraction, the
minimum-distance bound chain) and a decoder lab (exact and Monte Carlo
error probabilities with finite-blocklength lower bounds) round it out.
"""

from .channel import (
    ChannelMetricPair,
    InputDistribution,
    SupportSets,
    pair_from_rows,
    parse_pair,
    serialize_pair,
    support_sets,
)
from .codebook import (
    Codebook,
    DMinCertificate,
    SubcodeCertificate,
    d_min,
    delta_closeness,
    distance_matrix,
    dmin_certificate,
    joint_type,
    komlos_asymmetry_bound,
    komlos_extract,
    pair_distance,
    parse_codebook,
    pe_lower_bound_from_dmin,
    plotkin_holds,
    plotkin_identity,
    serialize_codebook,
)
from .decoder import (
    BoundReport,
    DecodingOutcome,
    EmpiricalPoint,
    conditional_types,
    empirical_exponent,
    exact_error_probabilities,
    monte_carlo_error,
    quantize_to_type,
    sup_error_lower_bound,
    tilted_error_lower_bound,
    type_class_probability,
    type_counting_slack,
)
from .errors import (
    BudgetExceededError,
    InfiniteExponentError,
    PreconditionError,
    ValidationError,
    ZerorateError,
)
from .exponent import (
    ExponentResult,
    LowerResult,
    QResult,
    RelaxedKernel,
    SearchOptions,
    expurgated_lower,
    gap_bound,
    geometric_s_grid,
    maximize_over_Q,
    objective,
    optimized_objective,
    relaxed_kernel,
    zero_rate_exponent,
)
from .kernel import (
    PairKernel,
    SupResult,
    conditional_kl,
    joint_counts,
    write_mu_curve,
)
from .zero_error import (
    BalanceViolation,
    RatioWitness,
    ZeroErrorReport,
    boundary_ratio,
    boundary_set_B,
    check_c0_zero,
    check_c0bar_zero,
    extremal_ratios,
    is_balanced,
    is_strict_support_match,
    zero_error_report,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChannelMetricPair",
    "InputDistribution",
    "SupportSets",
    "pair_from_rows",
    "parse_pair",
    "serialize_pair",
    "support_sets",
    "PairKernel",
    "SupResult",
    "conditional_kl",
    "joint_counts",
    "write_mu_curve",
    "BalanceViolation",
    "RatioWitness",
    "ZeroErrorReport",
    "boundary_ratio",
    "boundary_set_B",
    "check_c0_zero",
    "check_c0bar_zero",
    "extremal_ratios",
    "is_balanced",
    "is_strict_support_match",
    "zero_error_report",
    "ExponentResult",
    "LowerResult",
    "QResult",
    "RelaxedKernel",
    "SearchOptions",
    "expurgated_lower",
    "gap_bound",
    "geometric_s_grid",
    "maximize_over_Q",
    "objective",
    "optimized_objective",
    "relaxed_kernel",
    "zero_rate_exponent",
    "Codebook",
    "DMinCertificate",
    "SubcodeCertificate",
    "d_min",
    "delta_closeness",
    "distance_matrix",
    "dmin_certificate",
    "joint_type",
    "komlos_asymmetry_bound",
    "komlos_extract",
    "pair_distance",
    "parse_codebook",
    "pe_lower_bound_from_dmin",
    "plotkin_holds",
    "plotkin_identity",
    "serialize_codebook",
    "BoundReport",
    "DecodingOutcome",
    "EmpiricalPoint",
    "conditional_types",
    "empirical_exponent",
    "exact_error_probabilities",
    "monte_carlo_error",
    "quantize_to_type",
    "sup_error_lower_bound",
    "tilted_error_lower_bound",
    "type_class_probability",
    "type_counting_slack",
    "ZerorateError",
    "ValidationError",
    "PreconditionError",
    "InfiniteExponentError",
    "BudgetExceededError",
]
