"""Analytic model and Monte Carlo oracle for cache-enabled D2D offloading."""

from ._d2doffload import (
    CacheParams,
    ConfigError,
    DomainError,
    Estimate,
    GeometryError,
    IndexError,
    InsufficientSamples,
    Method,
    NetworkParams,
    NonConvergenceError,
    NumericalError,
    OptimalK,
    PerformanceModel,
    SelectionScheme,
    ToleranceNotMet,
    UndefinedConditional,
    analytic,
    cell_helper_count_pmf,
    containment_weight,
    coverage_cellular_at,
    distance_pdf,
    dump_profile,
    helper_count_at_least,
    hit_d2d,
    hit_mbs,
    hyp2f1,
    lens_area,
    load_cache,
    load_network,
    offloaded_fraction,
    optimal_k,
    p_d2d_mode,
    p_d2d_mode_bound,
    p_served_by_ith,
    p_user_inside,
    popularity,
    profile_names,
    profile_text,
    regularized_upper_gamma,
    render,
    simulate,
    simulate_p_inside,
    unconstrained_pdf,
)

__version__ = "0.1.0"
