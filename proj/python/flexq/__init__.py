"""Flexible queue deployment MDP: exact solver, structural checks and simulator."""

from ._flexq import (
    ConvergenceError,
    FlexqError,
    InstanceTooLarge,
    InvalidParams,
    InvalidState,
    Model,
    ModelParams,
    PolicyTable,
    SolveResult,
    StateSpace,
    brute_force_solve,
    check_build_threshold,
    check_domination,
    count_rejecting_states,
    fig2_params,
    fig3_params,
    fig4_params,
    long_run_metrics,
    params_from_config,
    policy_count,
    policy_evaluation,
    simulate,
    sweep_csv,
    value_iteration,
    value_policy_csv,
    value_surface_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
