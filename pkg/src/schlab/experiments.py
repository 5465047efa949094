"""Monte Carlo drivers shared by the command-line surface and the tests.

Each driver derives per-trial RNG streams from one master seed and folds
results in trial order, so outputs are identical for any worker count.
"""

from dataclasses import dataclass, replace

import numpy as np

from .model import arcsine_rho, sample_model
from .sde import sample_limit_shape
from .shape import fit_decay_slope, log_profile, peak, shape_measure
from .tridiag import eigenvalue_by_index, eigenvalues, eigenvector, sturm_count
from .util import child_seed, rng_stream, run_trials


@dataclass(frozen=True)
class ShapeRun:
    """Per-draw shape statistics plus a pooled log-density profile.

    profile_* arrays live on a distance grid of width 1/bins; slope is the
    count-weighted least-squares slope of the pooled mean profile.
    """

    mus: np.ndarray
    taus: np.ndarray
    peaks: np.ndarray
    slopes: np.ndarray
    profile_distances: np.ndarray
    profile_means: np.ndarray
    profile_counts: np.ndarray
    slope: float


def _nearest_eigenvalue(model, energy, tol=None):
    """Eigenvalue closest to ``energy``."""
    rank = sturm_count(model, energy)
    cands = [k for k in (rank - 1, rank) if 0 <= k < model.n]
    mus = [eigenvalue_by_index(model, k, tol) for k in cands]
    return min(mus, key=lambda m: abs(m - energy))


def _profile_accumulate(acc_sum, acc_cnt, prof, bins):
    idx = np.minimum((prof[:, 0] * bins).astype(np.int64), len(acc_sum) - 1)
    np.add.at(acc_sum, idx, prof[:, 1])
    np.add.at(acc_cnt, idx, 1)


def _pooled_slope(distances, means, counts):
    mask = counts > 0
    if mask.sum() < 2:
        return float("nan")
    d = distances[mask]
    y = means[mask]
    w = counts[mask].astype(np.float64)
    dbar = np.average(d, weights=w)
    ybar = np.average(y, weights=w)
    denom = np.sum(w * (d - dbar) ** 2)
    if denom == 0:
        return float("nan")
    return float(np.sum(w * (d - dbar) * (y - ybar)) / denom)


def _collect_shape_run(records, bins):
    mus, taus, peaks, slopes, profs = zip(*records)
    acc_sum = np.zeros(bins)
    acc_cnt = np.zeros(bins, dtype=np.int64)
    for prof in profs:
        _profile_accumulate(acc_sum, acc_cnt, prof, bins)
    means = np.divide(
        acc_sum, acc_cnt, out=np.full(bins, np.nan), where=acc_cnt > 0
    )
    distances = (np.arange(bins) + 0.5) / bins
    return ShapeRun(
        mus=np.array(mus),
        taus=np.array(taus),
        peaks=np.array(peaks),
        slopes=np.array(slopes),
        profile_distances=distances,
        profile_means=means,
        profile_counts=acc_cnt,
        slope=_pooled_slope(distances, means, acc_cnt),
    )


def eigenvector_shape_run(
    params,
    noise,
    trials,
    bins=64,
    window=None,
    select="uniform",
    energy=None,
    tol=None,
    threads=1,
):
    """Shape statistics over independent (matrix, eigenvalue) draws.

    ``select`` picks the eigenvalue per draw: "uniform" takes a uniformly
    random rank, "nearest" takes the eigenvalue closest to ``energy``.
    Records the scaled horizon tau = (sigma*rho(mu))^2 per draw (NaN when
    |mu| >= 2, outside the band).
    """
    if select not in ("uniform", "nearest"):
        raise ValueError("select must be 'uniform' or 'nearest'")
    if select == "nearest" and energy is None:
        raise ValueError("select='nearest' needs an energy")

    def one(t):
        p = replace(params, seed=child_seed(params.seed, t))
        model = sample_model(p, noise)
        if select == "uniform":
            rank = int(rng_stream(params.seed, t, 1).integers(model.n))
            mu = eigenvalue_by_index(model, rank, tol)
        else:
            mu = _nearest_eigenvalue(model, energy, tol)
        pair = eigenvector(model, mu)
        meas = shape_measure(pair, bins)
        pk = peak(meas, window)
        prof = log_profile(meas, pk)
        tau = (params.sigma * arcsine_rho(mu)) ** 2 if abs(mu) < 2.0 else float("nan")
        return mu, tau, pk, fit_decay_slope(prof), prof

    records = run_trials(one, trials, threads)
    return _collect_shape_run(records, bins)


def limit_shape_run(taus, seed, bins=64, window=None, threads=1):
    """Limit-shape statistics matched to a sequence of horizons ``taus``.

    Each draw runs through the same measure -> peak -> log-profile
    pipeline as the finite-size run.  Because the true peak location is
    drawn explicitly here, log profiles are centered on it, which keeps
    the fitted decay slopes free of the argmax selection bias; the
    reported peak estimates still come from the moving-average estimator
    so peak statistics stay comparable with the finite-size block.
    """
    taus = np.asarray(taus, dtype=np.float64)

    def one(t):
        tau = taus[t]
        if not np.isfinite(tau) or tau <= 0:
            tau = float(np.nanmean(taus[np.isfinite(taus)]))
        rng = rng_stream(seed, t, 4)
        u = float(rng.uniform())
        meas = sample_limit_shape(tau, rng, bin_count=bins, u=u)
        pk = peak(meas, window)
        prof = log_profile(meas, u)
        return float("nan"), tau, pk, fit_decay_slope(prof), prof

    records = run_trials(one, len(taus), threads)
    return _collect_shape_run(records, bins)


def fit_profile_slope(run, lo=0.0, hi=1.0, min_count=1):
    """Unweighted slope of the pooled mean profile over a distance band.

    Restricting to distances beyond ~3 peak-window widths avoids the
    neighborhood where centering on the estimated maximum selects
    upward-fluctuating density and steepens the apparent decay.
    """
    d = run.profile_distances
    m = run.profile_means
    c = run.profile_counts
    mask = (d >= lo) & (d < hi) & (c >= min_count) & np.isfinite(m)
    if mask.sum() < 2:
        return float("nan")
    d2, m2 = d[mask], m[mask]
    dbar, mbar = d2.mean(), m2.mean()
    return float(np.sum((d2 - dbar) * (m2 - mbar)) / np.sum((d2 - dbar) ** 2))


def pooled_spectrum(params, noise, trials, tol=None, threads=1):
    """Eigenvalues of ``trials`` independent draws, pooled and sorted."""

    def one(t):
        p = replace(params, seed=child_seed(params.seed, t))
        return eigenvalues(sample_model(p, noise), tol=tol)

    pooled = np.concatenate(run_trials(one, trials, threads))
    return np.sort(pooled)


def model_stream(params, noise, trials):
    """Generator of independent model draws with derived per-trial seeds."""
    for t in range(int(trials)):
        yield sample_model(replace(params, seed=child_seed(params.seed, t)), noise)
