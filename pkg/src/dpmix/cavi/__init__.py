"""Collapsed coordinate-ascent variational inference for DP mixtures."""

from .alpha import last_occupied, update_alpha
from .density import expected_log_density, loglik_matrix
from .fit import (fit, hard_assignments, init_responsibilities, reorder_clusters, run_single,
                  update_responsibilities)
from .objective import elbo, vll
from .state import AlphaState, ClusterParams, FitResult
from .updates import update_mu_sigma

__all__ = [
    "AlphaState", "ClusterParams", "FitResult", "elbo", "expected_log_density", "fit",
    "hard_assignments", "init_responsibilities", "last_occupied", "loglik_matrix",
    "reorder_clusters", "run_single", "update_alpha", "update_mu_sigma",
    "update_responsibilities", "vll",
]
