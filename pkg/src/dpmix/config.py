"""Covariance parameterizations and the hyperparameters that go with them."""

import enum
import json
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import errors
from .linalg import as_matrix, cholesky


class CovarianceModel(enum.Enum):
    """The eight covariance structures; the value is the CLI spelling."""

    M1_FixedDiag = "m1"
    M2_FixedFull = "m2"
    M3_GlobalDiag = "m3"
    M4_GlobalIW = "m4"
    M5_GlobalCholesky = "m5"
    M6_ClusterIW = "m6"
    M7_ClusterLaplace = "m7"
    M8_ClusterNormal = "m8"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for m in cls:
            if key in (m.value, m.name.lower()):
                return m
        raise errors.InputError("unknown model %r (expected m1..m8)" % (value,))

    @property
    def fixed(self):
        return self in (CovarianceModel.M1_FixedDiag, CovarianceModel.M2_FixedFull)

    @property
    def global_cov(self):
        return self in (CovarianceModel.M3_GlobalDiag, CovarianceModel.M4_GlobalIW,
                        CovarianceModel.M5_GlobalCholesky)

    @property
    def cluster_cov(self):
        return self in (CovarianceModel.M6_ClusterIW, CovarianceModel.M7_ClusterLaplace,
                        CovarianceModel.M8_ClusterNormal)

    @property
    def wishart(self):
        return self in (CovarianceModel.M4_GlobalIW, CovarianceModel.M6_ClusterIW)

    @property
    def elementwise(self):
        return self in (CovarianceModel.M7_ClusterLaplace, CovarianceModel.M8_ClusterNormal)


M = CovarianceModel

M8_C0 = 1e-3

# Matrix-valued fields accept a scalar c meaning c * identity.
MATRIX_FIELDS = ("mu_prior_cov", "fixed_cov", "scale0")


@dataclass(frozen=True)
class Hyperparams:
    """Fixed hyperparameters of one fit.

    Only the fields relevant to the chosen model are read. ``fixed_sigma``
    is the precision of M1 (covariance ``I / fixed_sigma``).
    ``alpha_stabilizer`` picks the constant inside the concentration rate
    update: ``"expected"`` uses the previous E[alpha], ``"one"`` uses 1.
    """

    truncation: int
    alpha_shape: float = 1.0
    alpha_rate: float = 1.0
    mu_prior_cov: object = 1.0
    k0: float = 1.0
    fixed_sigma: float = 1.0
    fixed_cov: object = 1.0
    g1: float = 0.001
    g2: float = 0.001
    nu0: float = 3.0
    scale0: object = 1.0
    mu0_L: float = 0.0
    sigma0_L: float = 1.0
    a0_L: float = 1.0
    b0_L: float = 1.0
    a0: float = 0.001
    b0: float = 0.001
    c0: float = 1.0
    restarts: int = 10
    max_iter: int = 500
    rel_tol: float = 1e-6
    q_tol: float = 1e-6
    seed: int = 0
    alpha_stabilizer: str = "expected"

    def with_(self, **changes):
        return replace(self, **changes)

    def matrix(self, name, d):
        return as_matrix(getattr(self, name), d)

    def to_dict(self):
        out = asdict(self)
        for key in MATRIX_FIELDS:
            value = out[key]
            if isinstance(value, np.ndarray):
                out[key] = value.tolist()
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise errors.UnknownConfigKey("unknown config keys: %s" % ", ".join(sorted(unknown)))
        data = dict(data)
        for key in MATRIX_FIELDS:
            if key in data and isinstance(data[key], (list, tuple)):
                data[key] = np.asarray(data[key], dtype=float)
        for key in ("truncation", "restarts", "max_iter", "seed"):
            if key in data:
                value = data[key]
                if isinstance(value, bool) or int(value) != value:
                    raise errors.ConfigError("%s must be an integer" % key)
                data[key] = int(value)
        return cls(**data)


def default_hyperparams(model, n, d):
    """Weakly-informative defaults for ``n`` observations in ``d`` dimensions."""
    model = CovarianceModel.parse(model)
    if n < 2:
        raise errors.InvalidDimension("need at least 2 observations, got %d" % n)
    if d < 1:
        raise errors.InvalidDimension("need at least 1 feature, got %d" % d)
    extra = {}
    if model is CovarianceModel.M8_ClusterNormal:
        # c0 is the prior mean of every off-diagonal precision; at 1 the
        # expected precision matrix is indefinite on most data
        extra["c0"] = M8_C0
    return Hyperparams(
        truncation=min(n, 25),
        k0=float(n + 1),
        nu0=float(d + 2),
        **extra,
    )


def _positive(h, names, exc):
    for name in names:
        value = getattr(h, name)
        if not (np.isfinite(value) and value > 0):
            raise exc("%s must be positive, got %r" % (name, value))


def validate(h, model, d):
    """Raise the matching ``ConfigError`` subclass for the first violated invariant."""
    model = CovarianceModel.parse(model)
    if d < 1:
        raise errors.InvalidDimension("d must be >= 1")
    if h.truncation < 2:
        raise errors.TruncationTooSmall("truncation K must be >= 2, got %d" % h.truncation)
    if h.restarts < 1:
        raise errors.ConfigError("restarts must be >= 1")
    if h.max_iter < 1:
        raise errors.ConfigError("max_iter must be >= 1")
    if h.seed < 0:
        raise errors.ConfigError("seed must be unsigned")
    _positive(h, ("alpha_shape",), errors.NonPositiveShape)
    _positive(h, ("alpha_rate", "rel_tol", "q_tol"), errors.NonPositiveRate)
    if h.alpha_stabilizer not in ("expected", "one"):
        raise errors.ConfigError("alpha_stabilizer must be 'expected' or 'one'")

    def pd(name):
        try:
            cholesky(h.matrix(name, d))
        except (errors.NotPositiveDefinite, ValueError) as exc:
            raise errors.ConfigError("%s must be a positive-definite %dx%d matrix: %s"
                                     % (name, d, d, exc)) from None

    if not model.cluster_cov:
        pd("mu_prior_cov")
    if model is M.M1_FixedDiag:
        _positive(h, ("fixed_sigma",), errors.NonPositiveRate)
    elif model is M.M2_FixedFull:
        pd("fixed_cov")
    elif model is M.M3_GlobalDiag:
        _positive(h, ("g1",), errors.NonPositiveShape)
        _positive(h, ("g2",), errors.NonPositiveRate)
    elif model is M.M5_GlobalCholesky:
        _positive(h, ("sigma0_L",), errors.NonPositiveRate)
        _positive(h, ("a0_L",), errors.NonPositiveShape)
        _positive(h, ("b0_L",), errors.NonPositiveRate)
    if model.wishart:
        if not h.nu0 > d - 1:
            raise errors.IWDegreesTooSmall("nu0 must exceed d - 1 = %d, got %r" % (d - 1, h.nu0))
        pd("scale0")
    if model.cluster_cov:
        _positive(h, ("k0",), errors.NonPositiveRate)
    if model.elementwise:
        _positive(h, ("a0",), errors.NonPositiveShape)
        _positive(h, ("b0", "c0"), errors.NonPositiveRate)


def save_config(path, model, h):
    doc = {"model": CovarianceModel.parse(model).value}
    doc.update(h.to_dict())
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path):
    """Read a JSON config; returns ``(model or None, dict of hyperparameter keys)``."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise errors.ParseError("config is not valid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise errors.ParseError("config must be a JSON object")
    model = doc.pop("model", None)
    known = {f.name for f in fields(Hyperparams)}
    unknown = set(doc) - known
    if unknown:
        raise errors.UnknownConfigKey("unknown config keys: %s" % ", ".join(sorted(unknown)))
    return (CovarianceModel.parse(model) if model is not None else None), doc
