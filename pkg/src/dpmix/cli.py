"""Command-line front end: fit, simulate, estimate-hyper, metrics, bench.

Exit codes: 0 on success, 2 on input or configuration errors, 3 on
numerical failures, 1 on anything else. Failures print one JSON object to
stderr.
"""

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .cavi import fit, run_single
from .config import CovarianceModel, default_hyperparams, load_config, validate
from .data import DataMatrix, ingest_csv, repr_float, write_matrix_csv
from .empirical_bayes import choose_k0, estimate_a0
from .errors import DPMixError, InputError, NumericalError, ParseError
from .metrics import ari
from .simulate import SimSpec, simulate

log = logging.getLogger("dpmix")

SUMMARY_KEYS = ("k_post", "ari", "vll", "elbo_final", "iterations", "restarts", "wall_time_s",
                "model", "hyper", "seed", "converged", "backend", "version")


def _setup_logging():
    level = os.environ.get("DPMIX_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise InputError("DPMIX_LOG must be one of error, info, debug")
    logging.basicConfig(level=levels[level], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def _fmt(value):
    """JSON text with every float at 17 significant digits."""
    if isinstance(value, dict):
        return "{" + ", ".join("%s: %s" % (json.dumps(k), _fmt(v)) for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, (bool, np.bool_)) or value is None:
        return json.dumps(None if value is None else bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return "null"
        return repr_float(value)
    if isinstance(value, np.ndarray):
        return _fmt(value.tolist())
    return json.dumps(value)


def dump_json(path, doc):
    text = _fmt(doc) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def _common(p):
    p.add_argument("--config", help="JSON file of hyperparameters (and optional model)")
    p.add_argument("--seed", type=int, help="base seed; restart r uses seed + r")
    p.add_argument("--threads", type=int, default=1, help="restarts run on this many threads")
    p.add_argument("--model", help="covariance model m1..m8 (default m7)")
    p.add_argument("--restarts", type=int, help="number of random restarts")
    p.add_argument("--standardize", action="store_true", help="z-score features before use")


def _data_args(p):
    p.add_argument("data", help="CSV/TSV file, rows are samples")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--label-column", help="column holding true labels (name or 0-based index)")
    p.add_argument("--id-column", help="column holding sample ids")


def build_parser():
    parser = argparse.ArgumentParser(prog="dpmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the mixture and write assignments")
    _common(p)
    _data_args(p)
    p.add_argument("--out", default="dpmix_out", help="output directory")
    p.add_argument("--a0", type=float, help="set a0 = b0 for M7/M8")
    p.add_argument("--estimate-a0", action="store_true", help="set a0 = b0 from the data")
    p.add_argument("--draws", type=int, default=100, help="random allocations for --estimate-a0")
    p.add_argument("--k0", type=float, help="mean prior scale (default N + 1)")
    p.add_argument("--truncation", type=int, help="number of clusters K")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--backend", choices=list(kernels.available_backends()))
    p.add_argument("--no-timing", action="store_true",
                   help="write wall_time_s as null so summaries compare byte for byte")

    p = sub.add_parser("simulate", help="write a synthetic labeled data set")
    _common(p)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--family", choices=("gaussian", "nb"), default="gaussian")
    p.add_argument("--separation", type=float, default=6.0)
    p.add_argument("--dispersion", type=float, default=10.0)
    p.add_argument("--out", default="sim_out")

    p = sub.add_parser("estimate-hyper", help="estimate a0 = b0 and k0 from data")
    _common(p)
    _data_args(p)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--truncation", type=int, help="columns of each random allocation")
    p.add_argument("--out", default="hyper_out")

    p = sub.add_parser("metrics", help="adjusted Rand index between two labelings")
    p.add_argument("pred", help="CSV with a cluster column (e.g. assignments.csv)")
    p.add_argument("truth", help="CSV with a label column")
    p.add_argument("--pred-column", default="-1", help="name or index (default last)")
    p.add_argument("--truth-column", default="-1")
    p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("bench", help="time fixed-sweep fits over N and d grids")
    _common(p)
    p.add_argument("--n-grid", default="100,200,400,800")
    p.add_argument("--d-grid", default="", help="d values timed at the first N (optional)")
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--sweeps", type=int, default=20)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--backend", choices=list(kernels.available_backends()) + ["all"])
    p.add_argument("--out", default="bench_out")
    return parser


def _resolve(args, n, d):
    """Model and hyperparameters from defaults, then --config, then flags."""
    model, overrides = (None, {})
    if args.config:
        model, overrides = load_config(args.config)
    if args.model:
        model = CovarianceModel.parse(args.model)
    model = model or CovarianceModel.M7_ClusterLaplace
    hyper = default_hyperparams(model, n, d)
    hyper = type(hyper).from_dict(dict(hyper.to_dict(), **overrides))
    flags = {}
    for name in ("seed", "restarts", "truncation", "k0"):
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = value
    if getattr(args, "max_iter", None) is not None:
        flags["max_iter"] = args.max_iter
    if getattr(args, "a0", None) is not None:
        flags["a0"] = flags["b0"] = args.a0
    return model, hyper.with_(**flags)


def _load(args):
    return ingest_csv(args.data, has_header=not args.no_header, label_column=args.label_column,
                      id_column=args.id_column, standardize=args.standardize)


def cmd_fit(args):
    data = _load(args)
    model, hyper = _resolve(args, data.n, data.d)
    if args.estimate_a0:
        a0 = estimate_a0(data.x, args.draws, hyper.seed, n_clusters=hyper.truncation)
        hyper = hyper.with_(a0=a0, b0=a0)
        log.info("estimated a0 = b0 = %.6g", a0)
    validate(hyper, model, data.d)
    result = fit(data, model, hyper, threads=args.threads, backend=args.backend)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    score = None
    if data.labels is not None:
        score = ari(result.assignments, data.labels)
    with open(out / "assignments.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "cluster"])
        for sid, z in zip(data.sample_ids, result.assignments):
            w.writerow([sid, int(z) + 1])
    write_matrix_csv(out / "responsibilities.csv", result.q,
                     header=["k%d" % (k + 1) for k in range(result.q.shape[1])])
    with open(out / "trace.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "elbo", "vll", "t", "E_alpha"])
        for it, e, v, t, ea in result.trace:
            w.writerow([it, repr_float(e), repr_float(v), t, repr_float(ea)])
    summary = {
        "k_post": result.k_post,
        "ari": score,
        "vll": result.vll,
        "elbo_final": result.elbo,
        "iterations": result.iterations,
        "restarts": hyper.restarts,
        "wall_time_s": None if args.no_timing else result.wall_time,
        "model": model.value,
        "hyper": dict(sorted(hyper.to_dict().items())),
        "seed": hyper.seed,
        "converged": result.converged,
        "backend": args.backend or kernels.BACKEND,
        "version": __version__,
    }
    dump_json(out / "summary.json", {k: summary[k] for k in SUMMARY_KEYS})
    line = "K_post=%d" % result.k_post
    if score is not None:
        line += " ARI=%.4f" % score
    print(line)
    return 0


def cmd_simulate(args):
    spec = SimSpec(args.n, args.d, args.k, args.family, args.separation, args.dispersion,
                   args.seed or 0)
    data = simulate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(out / "data.csv", data.x, header=["f%d" % (j + 1) for j in range(data.d)])
    with open(out / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "label"])
        for i, z in enumerate(data.labels):
            w.writerow([i, int(z)])
    print("wrote %d x %d matrix to %s" % (data.n, data.d, out / "data.csv"))
    return 0


def cmd_estimate_hyper(args):
    data = _load(args)
    seed = args.seed or 0
    k = args.truncation or min(data.n, 25)
    a0, profile = estimate_a0(data.x, args.draws, seed, n_clusters=k, return_profile=True)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "a0_curve.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a0", "median_derivative"])
        for g, v in zip(profile.grid, profile.derivative):
            w.writerow([repr_float(g), repr_float(v)])
    report = {"a0": a0, "b0": a0, "k0": choose_k0(data.n), "method": profile.method,
              "draws": args.draws, "n_clusters": k, "seed": seed, "n": data.n, "d": data.d}
    dump_json(out / "hyper.json", report)
    print("a0=b0=%s (%s) k0=%s" % (repr_float(a0), profile.method, repr_float(report["k0"])))
    return 0


def _column(path, column):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise ParseError("%s has no data rows" % path)
    header = rows[0]
    if column in header:
        idx = header.index(column)
    else:
        try:
            idx = int(column)
        except ValueError:
            raise InputError("column %r not in %s" % (column, path)) from None
    try:
        return [r[idx].strip() for r in rows[1:]]
    except IndexError:
        raise InputError("column %r out of range in %s" % (column, path)) from None


def cmd_metrics(args):
    pred = _column(args.pred, args.pred_column)
    truth = _column(args.truth, args.truth_column)
    score = ari(np.array(pred), np.array(truth))
    report = {"ari": score, "n": len(pred), "k_pred": len(set(pred)), "k_truth": len(set(truth))}
    dump_json(args.out, report)
    return 0


def _grid(text):
    values = [int(v) for v in text.split(",") if v.strip()]
    if any(v < 2 for v in values):
        raise InputError("grid values must be >= 2")
    return values


def time_fit(n, d, model, sweeps, reps, seed, backend):
    """Median seconds of ``reps`` fixed-sweep single-restart fits."""
    data = simulate(SimSpec(n, d, 3, "gaussian", seed=seed))
    hyper = default_hyperparams(model, n, d).with_(seed=seed, restarts=1)
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        run_single(data.x, model, hyper, seed, backend=backend, fixed_sweeps=sweeps)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def nlogn_slope(ns, seconds):
    """Least-squares slope of log(time) against log(N log N)."""
    ns = np.asarray(ns, dtype=float)
    if ns.size < 2:
        return None
    return float(np.polyfit(np.log(ns * np.log(ns)), np.log(seconds), 1)[0])


def cmd_bench(args):
    model = CovarianceModel.parse(args.model or "m7")
    seed = args.seed or 0
    backends = list(kernels.available_backends()) if args.backend == "all" else [args.backend or kernels.BACKEND]
    ns = _grid(args.n_grid)
    ds = _grid(args.d_grid) if args.d_grid else []
    rows = []
    report = {"model": model.value, "sweeps": args.sweeps, "reps": args.reps, "backends": {}}
    for backend in backends:
        secs = []
        for n in ns:
            t = time_fit(n, args.d, model, args.sweeps, args.reps, seed, backend)
            secs.append(t)
            rows.append((backend, "n", n, args.d, t))
            log.info("%s N=%d d=%d %.4fs", backend, n, args.d, t)
        for d in ds:
            t = time_fit(ns[0], d, model, args.sweeps, args.reps, seed, backend)
            rows.append((backend, "d", ns[0], d, t))
        slope = nlogn_slope(ns, secs)
        report["backends"][backend] = {"n_grid": ns, "seconds": secs, "slope_nlogn": slope}
        print("%s: %s" % (backend, "slope vs N log N = %.3f" % slope if slope is not None
                          else "single grid point, no slope"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["backend", "grid", "n", "d", "seconds"])
        for backend, grid, n, d, t in rows:
            w.writerow([backend, grid, n, d, repr_float(t)])
    dump_json(out / "bench.json", report)
    return 0


COMMANDS = {"fit": cmd_fit, "simulate": cmd_simulate, "estimate-hyper": cmd_estimate_hyper,
            "metrics": cmd_metrics, "bench": cmd_bench}


def _error_doc(exc):
    doc = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("row", "col", "restart", "iteration"):
        value = getattr(exc, attr, None)
        if value is not None:
            doc[attr] = value
    return doc


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _setup_logging()
        return COMMANDS[args.command](args)
    except (InputError, OSError) as exc:
        failure, code, category = exc, 2, "input"
    except NumericalError as exc:
        failure, code, category = exc, 3, "numerical"
    except DPMixError as exc:
        failure, code, category = exc, 1, "other"
    doc = dict(_error_doc(failure), category=category, exit_code=code)
    sys.stderr.write(_fmt(doc) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
