"""Distribution distances, the arcsine reference law, and comparison runs.

All Monte Carlo summaries report sample counts and 99% confidence
half-widths; comparisons are |lhs - rhs| against 3 standard errors or a
stated KS critical value, never bare magic constants.
"""

from dataclasses import dataclass, replace

import numpy as np

from .model import arcsine_rho, sample_model
from .sde import NoiseRealization, sample_limit_spectrum, TWO_PI
from .tridiag import eigenvalues, eigenvalues_in_interval, eigenvector
from .util import child_seed, rng_stream, run_trials

Z_99 = 2.5758293035489004  # two-sided 99% normal quantile
KS_C_1PCT = 1.6276236115189503  # sqrt(-log(0.005)/2), 1% KS coefficient


@dataclass(frozen=True)
class EmpiricalSummary:
    """Sample moments plus a KS distance against a reference."""

    sample_count: int
    mean: float
    variance: float
    ks_vs_reference: float
    ci_halfwidth: float


def summarize(samples, ks=float("nan")):
    """99% normal-approximation summary of a sample array."""
    samples = np.asarray(samples, dtype=np.float64)
    m = samples.size
    if m == 0:
        return EmpiricalSummary(0, float("nan"), float("nan"), float(ks), float("nan"))
    mean = float(samples.mean())
    var = float(samples.var(ddof=1)) if m > 1 else 0.0
    ci = Z_99 * np.sqrt(var / m) if m > 0 else float("nan")
    return EmpiricalSummary(m, mean, var, float(ks), float(ci))


def arcsine_cdf(energy):
    """CDF of the arcsine law on [-2, 2]: 1/2 + arcsin(E/2)/pi."""
    e = np.asarray(energy, dtype=np.float64)
    if np.any(np.abs(e) > 2.0):
        raise ValueError("arcsine_cdf is defined on [-2, 2]")
    out = 0.5 + np.arcsin(0.5 * e) / np.pi
    return float(out) if np.isscalar(energy) else out


def arcsine_cdf_clamped(x):
    """Arcsine CDF extended to the whole line (0 below -2, 1 above 2).

    Finite-size spectra can spill slightly past the band edges, so KS
    comparisons against the arcsine law use this extension.
    """
    return 0.5 + np.arcsin(np.clip(0.5 * np.asarray(x, dtype=np.float64), -1, 1)) / np.pi


def ks_one_sample(samples, cdf):
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    m = s.size
    if m == 0:
        raise ValueError("samples must be nonempty")
    vals = np.asarray(cdf(s), dtype=np.float64)
    upper = np.arange(1, m + 1) / m - vals
    lower = vals - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def ks_two_sample(a, b):
    """Two-sample sup distance between empirical CDFs (ties handled)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(m, n=None, alpha=0.01):
    """Asymptotic KS critical value at level alpha (default 1%).

    One-sample with sample size m, or two-sample when n is given.
    """
    c = np.sqrt(-0.5 * np.log(alpha / 2.0))
    if n is None:
        return float(c / np.sqrt(m))
    return float(c * np.sqrt((m + n) / (m * n)))


def dos_check(params, noise, trials, threads=1, tol=None):
    """Pooled-eigenvalue KS distance against the arcsine law.

    Pools the full spectra of ``trials`` independent draws (trial t uses
    the seed stream derived from params.seed and t) and summarizes the
    pooled sample with its KS distance to the arcsine CDF.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(t):
        p = replace(params, seed=child_seed(params.seed, t))
        return eigenvalues(sample_model(p, noise), tol=tol)

    pooled = np.concatenate(run_trials(one, trials, threads))
    ks = ks_one_sample(pooled, arcsine_cdf_clamped)
    return summarize(pooled, ks=ks)


@dataclass(frozen=True)
class GapComparison:
    """Finite-size vs limiting point process, windowed around one energy.

    ``count`` summarizes the finite-size window counts with ks_vs_reference
    the two-sample KS against limiting counts; ``first_gap`` does the same
    for the gap between the two lowest window points (trials with fewer
    than two points contribute no gap).  The limiting-side moments ride
    along for reporting.
    """

    count: EmpiricalSummary
    first_gap: EmpiricalSummary
    limit_count_mean: float
    limit_gap_count: int
    window_radius: float
    tau: float


def _window_points(model, energy, radius, rho, shift):
    """Rescaled-and-shifted eigenvalues n*rho*(mu - E) + shift inside [-R, R].

    Returns (points, mus) with matching order.
    """
    n = model.n
    lo = energy + (-radius - shift) / (n * rho)
    hi = energy + (radius - shift) / (n * rho)
    mus = eigenvalues_in_interval(model, lo, hi)
    pts = n * rho * (mus - energy) + shift
    keep = (pts >= -radius) & (pts <= radius)
    return pts[keep], mus[keep]


def gap_statistics(
    models,
    energy,
    radius,
    sigma,
    seed=0,
    sch_trials=None,
    dt=None,
    threads=1,
):
    """Compare windowed eigenvalue statistics against the limiting process.

    For each model in the ``models`` stream, eigenvalues are rescaled to
    spacing units around ``energy``, shifted by an independent uniform
    phase (matching the limit statement), and restricted to [-R, R].
    Count and first-gap samples are then KS-compared with samples of the
    limiting root process at tau = (sigma * rho(E))^2.
    """
    energy = float(energy)
    if energy == 0.0:
        raise ValueError("energy 0 is outside the proven comparison regime")
    rho = arcsine_rho(energy)
    if sigma <= 0:
        raise ValueError("sigma must be positive for a nondegenerate limit")
    if radius <= 0:
        raise ValueError("radius must be positive")
    tau = (float(sigma) * rho) ** 2
    if dt is None:
        dt = tau / 5000.0

    fin_counts, fin_gaps = [], []
    for t, model in enumerate(models):
        shift = rng_stream(seed, t, 2).uniform(0.0, TWO_PI)
        pts, _ = _window_points(model, energy, radius, rho, shift)
        fin_counts.append(pts.size)
        if pts.size >= 2:
            fin_gaps.append(pts[1] - pts[0])
    n_fin = len(fin_counts)
    if sch_trials is None:
        sch_trials = n_fin

    def one_sch(t):
        rng = rng_stream(seed, t, 3)
        phase = rng.uniform(0.0, TWO_PI)
        noise = NoiseRealization.sample(tau, dt, rng)
        spect = sample_limit_spectrum(
            tau, (-radius, radius), phase, noise, with_profiles=False
        )
        roots = spect.roots
        gap = roots[1] - roots[0] if roots.size >= 2 else None
        return roots.size, gap

    sch = run_trials(one_sch, sch_trials, threads)
    sch_counts = np.array([c for c, _ in sch], dtype=np.float64)
    sch_gaps = np.array([g for _, g in sch if g is not None])

    fin_counts = np.array(fin_counts, dtype=np.float64)
    fin_gaps = np.array(fin_gaps, dtype=np.float64)
    count_ks = ks_two_sample(fin_counts, sch_counts)
    gap_ks = (
        ks_two_sample(fin_gaps, sch_gaps)
        if fin_gaps.size and sch_gaps.size
        else float("nan")
    )
    return GapComparison(
        count=summarize(fin_counts, ks=count_ks),
        first_gap=summarize(fin_gaps, ks=gap_ks),
        limit_count_mean=float(sch_counts.mean()),
        limit_gap_count=int(sch_gaps.size),
        window_radius=float(radius),
        tau=tau,
    )


def shape_mass_comparison(
    models,
    energy,
    radius,
    sigma,
    seed=0,
    sch_trials=None,
    dt=None,
    threads=1,
):
    """Eigenvector shape law vs the limiting per-root mass profiles.

    Scalar shape functional: the fraction of squared mass on the first
    half of the horizon, for the spectral point nearest the window
    center.  Finite side: sum of psi^2 over sites l <= n/2 of the
    eigenvector whose rescaled-and-shifted eigenvalue is closest to 0 in
    [-R, R].  Limit side: the same half-mass of exp(log-mass profile) at
    the root closest to 0.  Returns an EmpiricalSummary of the finite
    sample whose ks_vs_reference is the two-sample KS between the laws,
    plus the limit sample count.
    """
    energy = float(energy)
    if energy == 0.0:
        raise ValueError("energy 0 is outside the proven comparison regime")
    rho = arcsine_rho(energy)
    if sigma <= 0:
        raise ValueError("sigma must be positive for a nondegenerate limit")
    tau = (float(sigma) * rho) ** 2
    if dt is None:
        dt = tau / 5000.0

    fin = []
    count = 0
    for t, model in enumerate(models):
        count += 1
        shift = rng_stream(seed, t, 4).uniform(0.0, TWO_PI)
        pts, mus = _window_points(model, energy, radius, rho, shift)
        if pts.size == 0:
            continue
        j = int(np.argmin(np.abs(pts)))
        pair = eigenvector(model, mus[j])
        fin.append(float(np.sum(pair.psi[: model.n // 2] ** 2)))
    if sch_trials is None:
        sch_trials = count

    def one_sch(t):
        rng = rng_stream(seed, t, 5)
        phase = rng.uniform(0.0, TWO_PI)
        noise = NoiseRealization.sample(tau, dt, rng)
        spect = sample_limit_spectrum(tau, (-radius, radius), phase, noise)
        if spect.roots.size == 0:
            return None
        j = int(np.argmin(np.abs(spect.roots)))
        mass = np.exp(spect.log_mass_profiles[j])
        half = spect.times <= 0.5 * tau
        return float(
            np.trapezoid(mass[half], spect.times[half])
            / np.trapezoid(mass, spect.times)
        )

    lim = [h for h in run_trials(one_sch, sch_trials, threads) if h is not None]
    ks = ks_two_sample(fin, lim) if fin and lim else float("nan")
    return summarize(np.array(fin), ks=ks), len(lim)
