"""Collapsed variational inference for Dirichlet-process Gaussian mixtures."""

__version__ = "0.1.0"

from .cavi import FitResult, fit
from .config import CovarianceModel, Hyperparams, default_hyperparams, validate
from .data import DataMatrix, ingest_csv
from .empirical_bayes import choose_k0, estimate_a0
from .kernels import BACKEND
from .metrics import ari, k_post
from .simulate import SimSpec, simulate

__all__ = [
    "BACKEND", "CovarianceModel", "DataMatrix", "FitResult", "Hyperparams", "SimSpec", "ari",
    "choose_k0", "default_hyperparams", "estimate_a0", "fit", "ingest_csv", "k_post", "simulate",
    "validate",
]
