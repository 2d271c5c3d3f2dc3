"""Zeros of Gaussian analytic functions: exact tails, bounds, events and Monte Carlo."""

from ._gafzeros import (
    DomainError,
    InconclusiveError,
    bernoulli_probs,
    count_zeros,
    direct_mc_tail,
    event_log_prob,
    exact_tail,
    exponent_fit,
    find_roots,
    ginibre_brackets,
    hyperbolic_sandwich,
    kappa,
    predicted_exponent,
    sum_n_log_n,
)

__all__ = [
    "DomainError",
    "InconclusiveError",
    "bernoulli_probs",
    "count_zeros",
    "direct_mc_tail",
    "event_log_prob",
    "exact_tail",
    "exponent_fit",
    "find_roots",
    "ginibre_brackets",
    "hyperbolic_sandwich",
    "kappa",
    "predicted_exponent",
    "sum_n_log_n",
]
