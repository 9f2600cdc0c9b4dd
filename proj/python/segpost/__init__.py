"""Exact change-point posteriors under a constrained hidden Markov model."""

from ._segpost import (
    DegenerateError,
    EmissionModel,
    InputError,
    TransitionPrior,
    changepoint_marginal,
    confidence_interval,
    fit_mle,
    forward_backward,
    greedy_segment,
    homogeneous_prior,
    log_density_table,
    loss,
    parametric_bootstrap,
    posterior,
    refine,
    sample_segmentations,
    select_segments,
    simulate_standard,
    tabulated_prior,
    viterbi,
)

__all__ = [
    "DegenerateError",
    "EmissionModel",
    "InputError",
    "TransitionPrior",
    "changepoint_marginal",
    "confidence_interval",
    "fit_mle",
    "forward_backward",
    "greedy_segment",
    "homogeneous_prior",
    "log_density_table",
    "loss",
    "parametric_bootstrap",
    "posterior",
    "refine",
    "sample_segmentations",
    "select_segments",
    "simulate_standard",
    "tabulated_prior",
    "viterbi",
]
