"""Compiled vs pure-Python responsibility sweep, alone and inside full fits.

Usage: python benchmarks/bench_backends.py [--reps 5] [--out bench_backends.csv]
"""

import argparse
import csv
import time

import numpy as np

from dpmix import kernels
from dpmix.cavi import init_responsibilities, run_single
from dpmix.config import CovarianceModel, default_hyperparams
from dpmix.moments import count_moments
from dpmix.simulate import SimSpec, simulate


def time_sweep(backend, n, k, reps, seed=0):
    rng = np.random.default_rng(seed)
    loglik = rng.normal(size=(n, k))
    out = []
    for _ in range(reps):
        q = init_responsibilities(n, k, seed)
        totals = np.ascontiguousarray(np.vstack(count_moments(q).arrays()))
        start = time.perf_counter()
        kernels.sweep_responsibilities(loglik, q, totals, 1.0, 0.1, backend=backend)
        out.append(time.perf_counter() - start)
    return float(np.median(out))


def time_fit(backend, n, d, reps, sweeps=20):
    model = CovarianceModel.M7_ClusterLaplace
    x = simulate(SimSpec(n, d, 3, seed=0)).x
    hyper = default_hyperparams(model, n, d).with_(restarts=1)
    out = []
    for _ in range(reps):
        start = time.perf_counter()
        run_single(x, model, hyper, 0, backend=backend, fixed_sweeps=sweeps)
        out.append(time.perf_counter() - start)
    return float(np.median(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--out", default="bench_backends.csv")
    args = ap.parse_args()
    backends = kernels.available_backends()
    rows = []
    for n in (100, 400, 1600, 6400):
        for k in (10, 25):
            times = {b: time_sweep(b, n, k, args.reps) for b in backends}
            rows.append(("sweep", n, k, times))
    for n in (100, 400, 800):
        times = {b: time_fit(b, n, 10, args.reps) for b in backends}
        rows.append(("fit20", n, 10, times))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["task", "n", "k_or_d"] + ["%s_s" % b for b in backends] + ["speedup"])
        for task, n, k, times in rows:
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            w.writerow([task, n, k] + ["%.6g" % times[b] for b in backends] + ["%.2f" % speed])
            print("%-6s n=%-5d %-3d " % (task, n, k)
                  + "  ".join("%s %.4fs" % (b, times[b]) for b in backends)
                  + "  x%.1f" % speed)


if __name__ == "__main__":
    main()
