"""Command-line surface: seeded, reproducible runs with CSV/JSON output.

Every command is a pure function of (config, seed): rerunning with the
same resolved config writes byte-identical primary output regardless of
the worker count (trials are merged in index order).  Wall-clock time is
echoed to stdout only, never into the output file.  Config precedence is
CLI flags > JSON config file > built-in defaults.

Exit codes: 0 success, 1 crash or I/O failure, 2 usage error, 3 requested
statistical thresholds not met (reported in-file).
"""

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .experiments import (
    eigenvector_shape_run,
    limit_shape_run,
    model_stream,
    pooled_spectrum,
)
from .model import ModelParams, NoiseSpec, arcsine_rho, sample_model
from .sde import (
    G_FUNCTIONALS,
    NoiseRealization,
    TWO_PI,
    intensity_check,
    sample_limit_spectrum,
)
from .shape import shape_measure
from .stats import (
    gap_statistics,
    ks_critical_value,
    ks_one_sample,
    shape_mass_comparison,
    summarize,
)
from .tridiag import eigenvalue_by_index, eigenvector
from .util import resolve_threads, rng_stream

VERSION_STRING = f"schlab {__version__}"

DEFAULTS = {
    "dos": {"n": None, "sigma": 1.0, "trials": 1, "noise": "gaussian", "bins": 64},
    "eigvec": {"n": None, "sigma": 1.0, "noise": "gaussian", "index": None, "bins": 64},
    "shape-stats": {
        "n": None,
        "sigma": 1.0,
        "trials": 200,
        "noise": "gaussian",
        "bins": 64,
        "select": "uniform",
        "energy": None,
    },
    "sch-sim": {
        "tau": 1.0,
        "window": [0.0, TWO_PI],
        "dt": None,
        "trials": 200,
        "g": "one",
        "profile_count": 3,
    },
    "compare": {
        "n": None,
        "sigma": 1.0,
        "energy": 0.5,
        "radius": TWO_PI,
        "trials": 500,
        "sch_trials": None,
        "noise": "gaussian",
        "count_ks_threshold": None,
        "gap_ks_threshold": None,
    },
}

FORMAT_DEFAULTS = {
    "dos": "csv",
    "eigvec": "csv",
    "shape-stats": "json",
    "sch-sim": "json",
    "compare": "json",
}


class UsageError(Exception):
    pass


def _sanitize(obj):
    """JSON-ready copy: arrays to lists, NaN/inf to None."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def _summary_dict(s):
    return {
        "sample_count": s.sample_count,
        "mean": s.mean,
        "variance": s.variance,
        "ks_vs_reference": s.ks_vs_reference,
        "ci_halfwidth_99": s.ci_halfwidth,
    }


def _write_output(out, fmt, command, config, results, ci, rows=None, header=None):
    """Assemble and write the primary output; returns the byte payload."""
    doc = {
        "command": command,
        "version": VERSION_STRING,
        "config": _sanitize(config),
        "results": _sanitize(results),
        "ci": _sanitize(ci),
        "runtime_seconds": None,
    }
    if fmt == "json":
        payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# {command} {VERSION_STRING}\n")
        buf.write("# config: " + json.dumps(doc["config"], sort_keys=True) + "\n")
        buf.write("# results: " + json.dumps(doc["results"], sort_keys=True) + "\n")
        buf.write("# ci: " + json.dumps(doc["ci"], sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        payload = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(payload)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    return payload


def _require(config, keys):
    missing = [k for k in keys if config.get(k) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join('--' + m for m in missing)}")


def cmd_dos(config, seed, threads):
    _require(config, ["n"])
    params = ModelParams(n=int(config["n"]), sigma=float(config["sigma"]), seed=seed)
    noise = NoiseSpec(config["noise"])
    pooled = pooled_spectrum(params, noise, int(config["trials"]), threads=threads)
    ks = ks_one_sample(pooled, arcsine_cdf_clamped)
    summary = summarize(pooled, ks=ks)

    bins = int(config["bins"])
    span = 2.0 + float(config["sigma"])
    edges = np.linspace(-span, span, bins + 1)
    counts, _ = np.histogram(pooled, bins=edges)
    width = edges[1] - edges[0]
    density = counts / (counts.sum() * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    arcsine = np.where(
        np.abs(centers) < 2.0,
        np.array([arcsine_rho(c) if abs(c) < 2 else 0.0 for c in centers]) / TWO_PI,
        0.0,
    )
    results = {
        "ks_vs_arcsine": ks,
        "pooled": _summary_dict(summary),
        "histogram": {
            "left": edges[:-1],
            "right": edges[1:],
            "count": counts,
            "density": density,
            "arcsine_density": arcsine,
        },
    }
    ci = {"pooled_mean_halfwidth_99": summary.ci_halfwidth}
    rows = [
        (float(edges[j]), float(edges[j + 1]), int(counts[j]), float(density[j]), float(arcsine[j]))
        for j in range(bins)
    ]
    header = ("bin_left", "bin_right", "count", "density", "arcsine_density")
    return results, ci, rows, header, 0


def cmd_eigvec(config, seed, threads):
    _require(config, ["n"])
    params = ModelParams(n=int(config["n"]), sigma=float(config["sigma"]), seed=seed)
    noise = NoiseSpec(config["noise"])
    model = sample_model(params, noise)
    if config["index"] is None:
        rank = int(rng_stream(seed, 0, 1).integers(model.n))
    else:
        rank = int(config["index"])
        if not 0 <= rank < model.n:
            raise UsageError(f"--index must be in [0, {model.n})")
    mu = eigenvalue_by_index(model, rank)
    pair = eigenvector(model, mu)
    meas = shape_measure(pair, int(config["bins"]))
    results = {
        "mu": mu,
        "index": pair.index,
        "psi_sq_sum": float(np.sum(pair.psi**2)),
        "bins": meas.bins,
    }
    ci = {}
    rows = [("psi", int(l + 1), float(v)) for l, v in enumerate(pair.psi)]
    rows += [("bin", int(j), float(v)) for j, v in enumerate(meas.bins)]
    header = ("kind", "index", "value")
    return results, ci, rows, header, 0


def _shape_block(run, bins):
    finite_taus = run.taus[np.isfinite(run.taus)]
    peak_ks = ks_one_sample(run.peaks, lambda x: np.clip(x, 0.0, 1.0))
    slopes = run.slopes[np.isfinite(run.slopes)]
    slope_summary = summarize(slopes)
    return {
        "trials": int(run.peaks.size),
        "tau_mean": float(finite_taus.mean()) if finite_taus.size else None,
        "peak_ks_vs_uniform": peak_ks,
        "peak_ks_critical_1pct": ks_critical_value(run.peaks.size),
        "slope_mean": slope_summary.mean,
        "slope_ci_halfwidth_99": slope_summary.ci_halfwidth,
        "pooled_profile_slope": run.slope,
        "profile": {
            "distance": run.profile_distances,
            "mean_log_density": run.profile_means,
            "count": run.profile_counts,
        },
        "peaks": run.peaks,
    }


def cmd_shape_stats(config, seed, threads):
    _require(config, ["n"])
    if config["select"] == "nearest":
        _require(config, ["energy"])
    params = ModelParams(n=int(config["n"]), sigma=float(config["sigma"]), seed=seed)
    noise = NoiseSpec(config["noise"])
    bins = int(config["bins"])
    finite = eigenvector_shape_run(
        params,
        noise,
        int(config["trials"]),
        bins=bins,
        select=config["select"],
        energy=config["energy"],
        threads=threads,
    )
    limit = limit_shape_run(finite.taus, seed=seed, bins=bins, threads=threads)
    results = {
        "draws": {"mu": finite.mus, "tau": finite.taus},
        "finite_n": _shape_block(finite, bins),
        "limit": _shape_block(limit, bins),
    }
    ci = {
        "finite_slope_ci": results["finite_n"]["slope_ci_halfwidth_99"],
        "limit_slope_ci": results["limit"]["slope_ci_halfwidth_99"],
    }
    rows = []
    for kind, run in (("finite", finite), ("limit", limit)):
        for i in range(run.peaks.size):
            rows.append(
                (
                    kind,
                    i,
                    float(run.mus[i]),
                    float(run.taus[i]),
                    float(run.peaks[i]),
                    float(run.slopes[i]),
                )
            )
    header = ("kind", "draw", "mu", "tau", "peak", "slope")
    return results, ci, rows, header, 0


def cmd_sch_sim(config, seed, threads):
    tau = float(config["tau"])
    window = tuple(float(x) for x in config["window"])
    dt = config["dt"]
    dt = tau / 5000.0 if dt is None else float(dt)
    trials = int(config["trials"])
    g_name = config["g"]
    if g_name not in G_FUNCTIONALS:
        raise UsageError(f"--g must be one of {sorted(G_FUNCTIONALS)}")

    realizations = []
    counts = []
    profiles = []
    keep = int(config["profile_count"])
    for t in range(trials):
        rng = rng_stream(seed, t, 0)
        phase = rng.uniform(0.0, TWO_PI)
        noise = NoiseRealization.sample(tau, dt, rng)
        spect = sample_limit_spectrum(tau, window, phase, noise, with_profiles=t < keep)
        counts.append(spect.roots.size)
        realizations.append({"phase": phase, "roots": spect.roots})
        if t < keep and spect.log_mass_profiles is not None:
            idx = np.linspace(0, spect.times.size - 1, min(101, spect.times.size)).astype(int)
            for i, root in enumerate(spect.roots):
                profiles.append(
                    {
                        "realization": t,
                        "root": float(root),
                        "time": spect.times[idx],
                        "mass_sq": np.exp(spect.log_mass_profiles[i][idx]),
                    }
                )

    intensity = intensity_check(
        tau, window, g_name, trials, seed, dt=dt, threads=threads
    )
    count_summary = summarize(np.array(counts, dtype=float))
    results = {
        "root_count": _summary_dict(count_summary),
        "expected_count": (window[1] - window[0]) / TWO_PI,
        "intensity": {
            "g": intensity.functional,
            "lhs": intensity.lhs,
            "rhs": intensity.rhs,
            "stderr": intensity.stderr,
        },
        "realizations": realizations,
        "profiles": profiles,
    }
    ci = {"root_count_mean_halfwidth_99": count_summary.ci_halfwidth}
    rows = []
    for t, real in enumerate(realizations):
        for j, root in enumerate(real["roots"]):
            rows.append((t, j, float(root)))
    header = ("realization", "root_index", "lambda")
    return results, ci, rows, header, 0


def cmd_compare(config, seed, threads):
    _require(config, ["n", "energy"])
    sigma = float(config["sigma"])
    energy = float(config["energy"])
    if abs(energy) >= 2.0 or energy == 0.0:
        raise UsageError("--energy must satisfy 0 < |E| < 2")
    trials = int(config["trials"])
    params = ModelParams(n=int(config["n"]), sigma=sigma, seed=seed)
    noise = NoiseSpec(config["noise"])

    if sigma == 0.0:
        results = {
            "degenerate": True,
            "note": "sigma=0 produces a rigid rescaled lattice; no limit comparison",
            "ks": None,
            "thresholds": None,
        }
        return results, {}, [("degenerate", 0, 1.0)], ("kind", "trial", "value"), 0

    sch_trials = config["sch_trials"] and int(config["sch_trials"])
    radius = float(config["radius"])
    comparison = gap_statistics(
        model_stream(params, noise, trials),
        energy,
        radius,
        sigma,
        seed=seed,
        sch_trials=sch_trials,
        threads=threads,
    )
    shape_summary, shape_limit_count = shape_mass_comparison(
        model_stream(params, noise, trials),
        energy,
        radius,
        sigma,
        seed=seed,
        sch_trials=sch_trials,
        threads=threads,
    )
    n_gap = comparison.first_gap.sample_count
    thresholds = {
        "count": config["count_ks_threshold"]
        or ks_critical_value(trials, trials),
        "first_gap": config["gap_ks_threshold"]
        or ks_critical_value(max(n_gap, 1), max(comparison.limit_gap_count, 1)),
        "shape_half_mass": ks_critical_value(
            max(shape_summary.sample_count, 1), max(shape_limit_count, 1)
        ),
    }
    ks = {
        "count": comparison.count.ks_vs_reference,
        "first_gap": comparison.first_gap.ks_vs_reference,
        "shape_half_mass": shape_summary.ks_vs_reference,
    }
    passed = bool(all(ks[k] <= thresholds[k] for k in ks))
    results = {
        "degenerate": False,
        "tau": comparison.tau,
        "window_radius": comparison.window_radius,
        "finite": {
            "count": _summary_dict(comparison.count),
            "first_gap": _summary_dict(comparison.first_gap),
            "shape_half_mass": _summary_dict(shape_summary),
        },
        "limit": {
            "count_mean": comparison.limit_count_mean,
            "gap_samples": comparison.limit_gap_count,
            "shape_samples": shape_limit_count,
        },
        "ks": ks,
        "thresholds": thresholds,
        "passed": passed,
    }
    ci = {
        "finite_count_mean_halfwidth_99": comparison.count.ci_halfwidth,
        "finite_gap_mean_halfwidth_99": comparison.first_gap.ci_halfwidth,
        "finite_shape_mean_halfwidth_99": shape_summary.ci_halfwidth,
    }
    rows = [("ks_" + k, 0, float(v)) for k, v in ks.items()]
    header = ("kind", "trial", "value")
    return results, ci, rows, header, 0 if passed else 3


COMMANDS = {
    "dos": cmd_dos,
    "eigvec": cmd_eigvec,
    "shape-stats": cmd_shape_stats,
    "sch-sim": cmd_sch_sim,
    "compare": cmd_compare,
}


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: SCHLAB_THREADS or machine)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (per-command default)")
    common.add_argument("--out", default=None, help="output path, '-' for stdout")
    common.add_argument("--config", default=None, help="JSON config file")

    parser = argparse.ArgumentParser(
        prog="schlab",
        description="Reproducible runs over the critical band ensemble and its limits.",
    )
    parser.add_argument("--version", action="version", version=VERSION_STRING)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dos", parents=[common],
                       help="pooled eigenvalue histogram vs the arcsine law",
                       description="CSV columns: bin_left, bin_right, count, density, arcsine_density.")
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--noise", choices=("rademacher", "gaussian", "uniform"))
    p.add_argument("--bins", type=int)

    p = sub.add_parser("eigvec", parents=[common],
                       help="one eigenvector with its binned mass profile",
                       description="CSV columns: kind (psi|bin), index, value.")
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--noise", choices=("rademacher", "gaussian", "uniform"))
    p.add_argument("--index", type=int, help="0-based rank in the sorted spectrum")
    p.add_argument("--bins", type=int)

    p = sub.add_parser("shape-stats", parents=[common],
                       help="peak/decay statistics, finite size vs the limit shape",
                       description="CSV columns: kind (finite|limit), draw, mu, tau, peak, slope.")
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--noise", choices=("rademacher", "gaussian", "uniform"))
    p.add_argument("--bins", type=int)
    p.add_argument("--select", choices=("uniform", "nearest"))
    p.add_argument("--energy", type=float)

    p = sub.add_parser("sch-sim", parents=[common],
                       help="limiting root-process realizations and intensity check",
                       description="CSV columns: realization, root_index, lambda.")
    p.add_argument("--tau", type=float)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--dt", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--g", choices=tuple(sorted(G_FUNCTIONALS)))
    p.add_argument("--profile-count", dest="profile_count", type=int)

    p = sub.add_parser("compare", parents=[common],
                       help="windowed eigenvalue statistics vs the limiting process",
                       description="CSV columns: kind, trial, value (KS statistics).")
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--energy", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--sch-trials", dest="sch_trials", type=int)
    p.add_argument("--noise", choices=("rademacher", "gaussian", "uniform"))
    p.add_argument("--count-ks-threshold", dest="count_ks_threshold", type=float)
    p.add_argument("--gap-ks-threshold", dest="gap_ks_threshold", type=float)
    return parser


def _resolve_config(command, args):
    """Merge CLI > config file > defaults; returns (config, seed, threads, fmt, out)."""
    resolved = dict(DEFAULTS[command])
    meta = {"seed": 0, "format": FORMAT_DEFAULTS[command], "out": "-", "threads": None}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            from_file = json.load(fh)
        for k, v in from_file.items():
            k = k.replace("-", "_")
            if k in resolved:
                resolved[k] = v
            elif k in meta:
                meta[k] = v
            else:
                raise UsageError(f"unknown config key {k!r} for command {command}")
    for k in resolved:
        v = getattr(args, k, None)
        if v is not None:
            resolved[k] = v
    for k in meta:
        v = getattr(args, k, None)
        if v is not None:
            meta[k] = v
    return resolved, int(meta["seed"]), meta["threads"], meta["format"], meta["out"]


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config, seed, threads, fmt, out = _resolve_config(args.command, args)
        threads = resolve_threads(threads)
        start = time.perf_counter()
        results, ci, rows, header, code = COMMANDS[args.command](config, seed, threads)
        embedded = dict(config)
        embedded["seed"] = seed
        embedded["format"] = fmt
        _write_output(out, fmt, args.command, embedded, results, ci, rows, header)
        runtime = time.perf_counter() - start
        print(
            f"schlab {args.command}: seed={seed} threads={threads} "
            f"runtime={runtime:.2f}s out={out}",
            file=sys.stderr,
        )
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
