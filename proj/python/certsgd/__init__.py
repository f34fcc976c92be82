"""Certified stopping and anytime confidence bounds for projected SGD."""

from ._certsgd import (
    ConfidenceConfig,
    DomainError,
    Infeasible,
    StepSchedule,
    Unavailable,
    certify,
    constant_c1,
    coverage,
    cumulative,
    grid_index,
    k_alpha,
    log_mixture,
    lower_bound_demo,
    partial_sum_s,
    project_ball,
    project_box,
    run_cli,
    s_lower_bound,
    st_threshold_time,
    tau_bound_harmonic,
    tau_bound_poly,
    u_adaptive,
    u_obs,
    v_infinity_upper,
)

__all__ = [
    "ConfidenceConfig",
    "DomainError",
    "Infeasible",
    "StepSchedule",
    "Unavailable",
    "certify",
    "constant_c1",
    "coverage",
    "cumulative",
    "grid_index",
    "k_alpha",
    "log_mixture",
    "lower_bound_demo",
    "partial_sum_s",
    "project_ball",
    "project_box",
    "run_cli",
    "s_lower_bound",
    "st_threshold_time",
    "tau_bound_harmonic",
    "tau_bound_poly",
    "u_adaptive",
    "u_obs",
    "v_infinity_upper",
]
