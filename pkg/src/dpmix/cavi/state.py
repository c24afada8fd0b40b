"""Variational state containers."""

from dataclasses import dataclass, field, fields, replace

import numpy as np

from ..config import CovarianceModel


@dataclass(frozen=True)
class AlphaState:
    """q(alpha) = Gamma(shape w1, rate w2)."""

    w1: float
    w2: float

    @property
    def mean(self):
        return self.w1 / self.w2

    @property
    def var(self):
        return self.w1 / (self.w2 * self.w2)


# Fields carrying a leading cluster axis; permuted by reordering.
_PER_CLUSTER = ("phi", "lam", "prec", "eld", "nu", "scale", "shape", "rate",
                "offdiag", "offdiag_kl")


@dataclass
class ClusterParams:
    """Variational parameters of the cluster means and covariances.

    Common to every model:

    phi : (K, d) means of q(mu_k)
    lam : (K, d) diagonal or (K, d, d) full covariances of q(mu_k)
    prec : (K, d) or (K, d, d), E[Sigma_k^{-1}]
    eld : (K,), E[log det Sigma_k^{-1}]

    Model blocks, ``None`` when unused:

    nu, scale : inverse-Wishart degrees and scale; per cluster (M6) or
        global (M4, then ``shared`` is true)
    shape, rate : (K, d) Gamma parameters of the precision diagonals (M7/M8)
    offdiag : (K, d, d) Laplace scales c_kij (M7, when small enough to keep)
    offdiag_kl : (K,) summed off-diagonal prior-minus-entropy contribution (M7/M8)
    sigma_shape, sigma_rate : Gamma parameters of the global precision scalar (M3)
    chol_mean, chol_var, chol_shape, chol_rate : element-wise q of the
        Cholesky factor (M5); diagonal variances live in ``chol_var`` too
    """

    model: CovarianceModel
    phi: np.ndarray
    lam: np.ndarray
    prec: np.ndarray
    eld: np.ndarray
    shared: bool = False
    nu: object = None
    scale: np.ndarray = None
    shape: np.ndarray = None
    rate: np.ndarray = None
    offdiag: np.ndarray = None
    offdiag_kl: np.ndarray = None
    sigma_shape: float = None
    sigma_rate: float = None
    chol_mean: np.ndarray = None
    chol_var: np.ndarray = None
    chol_shape: np.ndarray = None
    chol_rate: np.ndarray = None
    extra: dict = field(default_factory=dict)

    @property
    def n_clusters(self):
        return self.phi.shape[0]

    @property
    def dim(self):
        return self.phi.shape[1]

    def permuted(self, perm):
        perm = np.asarray(perm)
        changes = {}
        for name in _PER_CLUSTER:
            value = getattr(self, name)
            if value is None:
                continue
            if self.shared and name in ("prec", "eld", "nu", "scale"):
                # global blocks are broadcast views; a relabeling leaves them alone
                continue
            changes[name] = np.asarray(value)[perm]
        return replace(self, **changes)

    def copy(self):
        changes = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, np.ndarray):
                changes[f.name] = value.copy()
        return replace(self, **changes)


@dataclass
class FitResult:
    assignments: np.ndarray
    k_post: int
    q: np.ndarray
    alpha: AlphaState
    clusters: ClusterParams
    elbo_trace: list
    vll: float
    iterations: int
    converged: bool
    seed: int
    wall_time: float
    trace: list = field(default_factory=list)
    restart: int = 0
    restart_vll: list = field(default_factory=list)

    @property
    def elbo(self):
        return self.elbo_trace[-1] if self.elbo_trace else float("nan")
