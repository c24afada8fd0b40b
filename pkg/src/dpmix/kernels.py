"""Pick the compiled sweep kernel when it is built, else the pure-Python one.

Set ``DPMIX_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _sweep_py
from .errors import NumericalOverflow

BACKEND = "python"
_compiled = None
if not os.environ.get("DPMIX_PURE_PYTHON"):
    try:
        from . import _sweep as _compiled
        BACKEND = "cython"
    except ImportError:  # extension not built
        _compiled = None


def available_backends():
    return ("python", "cython") if _compiled is not None else ("python",)


def get_sweep(backend=None):
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel dpmix._sweep is not built")
        return _compiled.sweep
    if backend == "python":
        return _sweep_py.sweep
    raise ValueError("unknown backend %r" % (backend,))


def sweep_responsibilities(loglik, q, totals, alpha_mean, alpha_var, backend=None):
    """Run one sequential leave-one-out sweep over all rows of ``q`` (in place).

    Returns the largest absolute change of any entry of ``q``.
    """
    loglik = np.ascontiguousarray(loglik, dtype=float)
    if not (q.flags.c_contiguous and totals.flags.c_contiguous):
        raise ValueError("q and totals must be C-contiguous float64 arrays")
    change, bad = get_sweep(backend)(loglik, q, totals, float(alpha_mean), float(alpha_var))
    if bad >= 0:
        raise NumericalOverflow("responsibility row %d has no finite normalization" % bad)
    return change
