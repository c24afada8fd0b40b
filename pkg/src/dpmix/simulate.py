"""Seeded synthetic data for the model-comparison and robustness experiments."""

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix, standardize
from .errors import InputError


@dataclass(frozen=True)
class SimSpec:
    n: int
    d: int
    k_true: int
    family: str = "gaussian"
    separation: float = 6.0
    dispersion: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in ("gaussian", "nb"):
            raise InputError("family must be 'gaussian' or 'nb', got %r" % (self.family,))
        if min(self.n, self.d, self.k_true) < 1 or self.k_true > self.n:
            raise InputError("need 1 <= k_true <= n and d >= 1")
        if self.separation < 0 or self.dispersion <= 0:
            raise InputError("separation must be >= 0 and dispersion > 0")


def _labels(rng, n, k):
    # equal probabilities, redrawn until every cluster is present
    while True:
        z = rng.integers(0, k, size=n)
        if np.unique(z).size == k:
            return z


def simulate(spec):
    """Draw a labeled data set; labels are 1-based."""
    rng = np.random.default_rng(spec.seed)
    z = _labels(rng, spec.n, spec.k_true)
    if spec.family == "gaussian":
        centers = rng.standard_normal((spec.k_true, spec.d))
        norms = np.linalg.norm(centers, axis=1, keepdims=True)
        centers = spec.separation * centers / np.where(norms > 0, norms, 1.0)
        x = centers[z] + rng.standard_normal((spec.n, spec.d))
    else:
        means = rng.lognormal(mean=1.0, sigma=0.5, size=(spec.k_true, spec.d))
        mu = means[z]
        size = spec.dispersion
        # numpy's NB counts failures before `size` successes with success prob p
        counts = rng.negative_binomial(size, size / (size + mu))
        x = standardize(counts.astype(float))
    return DataMatrix(x, z + 1, meta={"spec": spec})
