"""Limiting diffusion objects and their point process.

A frozen :class:`NoiseRealization` drives everything: the coupled
phase/log-mass/phase-slope system, the root set where the terminal phase
hits a shifted lattice (the limiting eigenvalue point process), the
matrix-valued evolution it all derives from, and the exponential
Brownian limit shape.  Storing the increments is what lets root searches
re-integrate the same path during bisection and lets gradient checks
share noise between parameter values.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .shape import ShapeMeasure
from .util import rng_stream, run_trials

TWO_PI = 2.0 * np.pi


class StepSizeError(RuntimeError):
    """The Euler grid is too coarse for the realized noise; shrink dt."""


class ResourceLimitError(RuntimeError):
    """A scan would need more path storage than the configured cap."""


@dataclass(frozen=True)
class NoiseRealization:
    """Increment arrays of one driving noise path on [0, T].

    db holds N(0, dt) increments of the real motion; dw holds complex
    increments whose real and imaginary parts are each N(0, dt/2).
    """

    dt: float
    db: np.ndarray
    dw: np.ndarray

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.db.shape != self.dw.shape or self.db.ndim != 1:
            raise ValueError("db and dw must be 1-D arrays of equal length")

    @property
    def steps(self):
        return self.db.size

    @property
    def total_time(self):
        return self.dt * self.steps

    @property
    def times(self):
        return self.dt * np.arange(self.steps + 1)

    @classmethod
    def sample(cls, total_time, dt, rng):
        """Draw increments covering [0, total_time] at step ~dt.

        The step count is rounded so the grid lands exactly on
        total_time.  Draw order is fixed (db, then Re dw, then Im dw) so
        a given generator state always produces the same realization.
        """
        if total_time <= 0 or dt <= 0:
            raise ValueError("total_time and dt must be positive")
        m = max(1, int(round(total_time / dt)))
        step = total_time / m
        db = rng.normal(0.0, math.sqrt(step), m)
        dwr = rng.normal(0.0, math.sqrt(0.5 * step), m)
        dwi = rng.normal(0.0, math.sqrt(0.5 * step), m)
        return cls(dt=step, db=db, dw=dwr + 1j * dwi)

    @classmethod
    def zeros(cls, total_time, dt):
        """Drift-only degenerate realization (test hook)."""
        m = max(1, int(round(total_time / dt)))
        step = total_time / m
        z = np.zeros(m)
        return cls(dt=step, db=z, dw=z + 0j)

    def coarsen(self):
        """Same underlying path on a grid twice as coarse (pairwise sums)."""
        if self.steps % 2:
            raise ValueError("step count must be even to coarsen")
        return NoiseRealization(
            dt=2.0 * self.dt,
            db=self.db.reshape(-1, 2).sum(axis=1),
            dw=self.dw.reshape(-1, 2).sum(axis=1),
        )

    def parts(self):
        """(db, Re dw, Im dw) as contiguous float64 arrays for the kernels."""
        return (
            np.ascontiguousarray(self.db),
            np.ascontiguousarray(self.dw.real),
            np.ascontiguousarray(self.dw.imag),
        )


@dataclass(frozen=True)
class LimitPath:
    """Coupled phase / log-mass / phase-slope trajectories on [0, T].

    phase(0) = log_mass(0) = phase_slope(0) = 0; phase_slope stays
    nonnegative (it is the derivative of the phase in the drift
    parameter, positive in the continuum).
    """

    lam: float
    times: np.ndarray
    phase: np.ndarray
    log_mass: np.ndarray
    phase_slope: np.ndarray


@dataclass(frozen=True)
class LimitSpectrumSample:
    """Roots of the terminal phase on a shifted lattice, with profiles.

    roots are strictly increasing; for each the terminal phase sits on
    2*pi*Z + phase_offset to within the root tolerance.  Profile row i is
    the log-mass path of root i on the noise grid (present only when the
    sample was taken with profiles enabled).
    """

    tau: float
    phase_offset: float
    roots: np.ndarray
    log_mass_profiles: np.ndarray | None
    times: np.ndarray


def _require_coverage(noise, tau):
    if abs(noise.total_time - tau) > 1e-9 * max(1.0, abs(tau)):
        raise ValueError(
            f"noise covers [0, {noise.total_time}], expected [0, {tau}]"
        )


def simulate_limit_path(lam, tau, noise):
    """Euler paths of the coupled system for one drift parameter.

    All three components are driven by the same realization.  Raises
    :class:`StepSizeError` if a phase step reaches pi or the slope goes
    negative, both signs that dt is too coarse for this noise.
    """
    _require_coverage(noise, tau)
    db, dwr, dwi = noise.parts()
    theta, logm, slope = _kernels.phase_mass_paths(
        np.array([float(lam)]), noise.dt, db, dwr, dwi
    )
    if np.max(np.abs(np.diff(theta[0]))) >= np.pi:
        raise StepSizeError("phase moved by >= pi in one step; shrink dt")
    if slope[0].min() < 0.0:
        raise StepSizeError("phase slope went negative; shrink dt")
    return LimitPath(
        lam=float(lam),
        times=noise.times,
        phase=theta[0],
        log_mass=logm[0],
        phase_slope=slope[0],
    )


def _terminal_phase(lams, tau, noise):
    """Terminal phase of the tau-rescaled system at spectral offsets ``lams``."""
    db, dwr, dwi = noise.parts()
    theta, maxstep = _kernels.phase_finals(
        np.asarray(lams, dtype=np.float64) / tau, noise.dt, db, dwr, dwi
    )
    if maxstep.max(initial=0.0) >= np.pi:
        raise StepSizeError("phase moved by >= pi in one step; shrink dt")
    return theta

MAX_SCAN_POINTS = 500_000


def sample_limit_spectrum(
    tau,
    window,
    phase,
    noise,
    tol=1e-8,
    with_profiles=True,
    stop_after=None,
):
    """Roots of the terminal phase on the lattice 2*pi*Z + phase.

    The window [lo, hi) is scanned on a grid sized from observed phase
    slopes so the terminal phase moves well under pi per grid cell, then
    every lattice crossing is bisected in the spectral offset while
    re-integrating the frozen realization.  ``stop_after`` truncates the
    scan after that many roots (counted from the left edge).
    """
    lo, hi = (float(window[0]), float(window[1]))
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("window must be a finite increasing pair")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if tau <= 0:
        raise ValueError("tau must be positive")
    _require_coverage(noise, tau)
    phase = float(phase)
    phase_offset = phase % TWO_PI

    db, dwr, dwi = noise.parts()
    probes = np.array([lo, 0.5 * (lo + hi), hi]) / tau
    _, _, slopes = _kernels.phase_mass_paths(probes, noise.dt, db, dwr, dwi)
    max_slope = max(float(slopes.max()), 1e-12)
    step = tau * np.pi / (2.0 * max_slope)
    npts = int(np.ceil((hi - lo) / step)) + 1
    npts = max(npts, 3)
    if npts > MAX_SCAN_POINTS:
        raise ResourceLimitError(
            f"window needs {npts} scan points (cap {MAX_SCAN_POINTS}); "
            "shrink the window or raise tau"
        )
    grid = np.linspace(lo, hi, npts)
    gvals = _terminal_phase(grid, tau, noise)

    # refine any cell where the terminal phase still moves close to pi
    for _ in range(40):
        dg = np.diff(gvals)
        bad = np.where(dg >= 0.95 * np.pi)[0]
        if bad.size == 0:
            break
        if grid.size + bad.size > MAX_SCAN_POINTS:
            raise ResourceLimitError("scan refinement exceeded the point cap")
        mids = 0.5 * (grid[bad] + grid[bad + 1])
        gmids = _terminal_phase(mids, tau, noise)
        grid = np.concatenate([grid, mids])
        gvals = np.concatenate([gvals, gmids])
        order = np.argsort(grid)
        grid = grid[order]
        gvals = gvals[order]
    if np.any(np.diff(gvals) < -1e-6):
        raise StepSizeError("terminal phase not monotone on the scan grid")

    roots = []
    # exact hit on the left edge belongs to the half-open window
    k0 = round((gvals[0] - phase) / TWO_PI)
    if abs(gvals[0] - (TWO_PI * k0 + phase)) <= tol:
        roots.append(lo)

    lo_brk, hi_brk, targets = [], [], []
    budget = None if stop_after is None else int(stop_after) - len(roots)
    g_end = gvals[-1]
    for i in range(grid.size - 1):
        glo, ghi = gvals[i], gvals[i + 1]
        kmin = int(np.floor((glo - phase) / TWO_PI)) + 1
        kmax = int(np.floor((ghi - phase) / TWO_PI))
        for k in range(kmin, kmax + 1):
            t = TWO_PI * k + phase
            if abs(t - g_end) <= tol:
                # the crossing sits at the right edge; [lo, hi) excludes it
                continue
            lo_brk.append(grid[i])
            hi_brk.append(grid[i + 1])
            targets.append(t)
        if budget is not None and len(targets) >= budget:
            break

    if targets:
        lo_arr = np.array(lo_brk)
        hi_arr = np.array(hi_brk)
        t_arr = np.array(targets)
        mid = 0.5 * (lo_arr + hi_arr)
        for _ in range(200):
            gm = _terminal_phase(mid, tau, noise)
            err = gm - t_arr
            if np.all(np.abs(err) <= tol):
                break
            above = err >= 0.0
            hi_arr = np.where(above, mid, hi_arr)
            lo_arr = np.where(above, lo_arr, mid)
            new_mid = 0.5 * (lo_arr + hi_arr)
            if np.all(np.abs(new_mid - mid) <= 1e-15 * np.maximum(1.0, np.abs(mid))):
                mid = new_mid
                break
            mid = new_mid
        gm = _terminal_phase(mid, tau, noise)
        if np.max(np.abs(gm - t_arr)) > 10 * tol:
            raise RuntimeError("root bisection failed to meet tolerance")
        roots.extend(mid.tolist())

    roots = np.array(sorted(r for r in roots if lo <= r < hi))
    if stop_after is not None:
        roots = roots[: int(stop_after)]

    profiles = None
    if with_profiles and roots.size:
        _, logm, _ = _kernels.phase_mass_paths(roots / tau, noise.dt, db, dwr, dwi)
        profiles = logm
    return LimitSpectrumSample(
        tau=float(tau),
        phase_offset=phase_offset,
        roots=roots,
        log_mass_profiles=profiles,
        times=noise.times,
    )


def _brownian_at(points, rng):
    """Standard two-sided Brownian values at ascending points (0-anchored).

    The two sides of the origin get independent one-sided paths glued at
    0; draws happen negative side first, then positive, so the output is
    a pure function of the generator state.
    """
    points = np.asarray(points, dtype=np.float64)
    values = np.empty_like(points)
    neg = points < 0.0
    if np.any(neg):
        dist = -points[neg][::-1]
        inc = rng.normal(0.0, np.sqrt(np.diff(dist, prepend=0.0)))
        values[neg] = np.cumsum(inc)[::-1]
    pos = ~neg
    if np.any(pos):
        dist = points[pos]
        inc = rng.normal(0.0, np.sqrt(np.diff(dist, prepend=0.0)))
        values[pos] = np.cumsum(inc)
    return values


def sample_log_shape(tau, u, t_points, rng):
    """One draw of the log limit shape at positions ``t_points`` in [0, 1].

    Returns Z_{tau(t-u)}/sqrt(2) - tau|t-u|/4 with Z a two-sided Brownian
    motion; the mean at fixed (t, u) is -tau|t-u|/4 and the variance is
    tau|t-u|/2.
    """
    t_points = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
    s = tau * (t_points - float(u))
    order = np.argsort(s)
    z_sorted = _brownian_at(s[order], rng)
    z = np.empty_like(z_sorted)
    z[order] = z_sorted
    return z / np.sqrt(2.0) - np.abs(s) / 4.0


def sample_limit_shape(tau, rng, bin_count=64, oversample=8, u=None, z_values=None):
    """One draw of the normalized limit shape, binned on [0, 1].

    Draws the peak location uniformly (unless ``u`` is given), evaluates
    exp of the log shape on a fine grid of bin_count*oversample points,
    averages down to bin_count bins, and normalizes to total mass 1.
    ``z_values`` substitutes a precomputed Brownian path on the fine grid
    (test hook; zeros give the pure exponential profile).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    b = int(bin_count)
    m = b * int(oversample)
    peak_u = float(rng.uniform()) if u is None else float(u)
    t = (np.arange(m) + 0.5) / m
    s = tau * (t - peak_u)
    if z_values is None:
        z = _brownian_at(s, rng)
    else:
        z = np.asarray(z_values, dtype=np.float64)
        if z.shape != s.shape:
            raise ValueError("z_values must match the fine grid length")
    logs = z / np.sqrt(2.0) - np.abs(s) / 4.0
    vals = np.exp(logs)
    binned = vals.reshape(b, -1).mean(axis=1)
    return ShapeMeasure(bins=binned / (binned.sum() / b))


def simulate_limit_transfer(ctx, lam, noise):
    """Euler path of the matrix evolution behind the coupled system.

    dQ = (1/2) Z (diag(i lam, -i lam) dt + [[i dB, dW], [conj dW, -i dB]])
    Z^{-1} Q, Q(0) = I, in the basis carried by ``ctx``.  Returns an
    (steps+1, 2, 2) complex array on the noise grid.
    """
    lam = float(lam)
    dt = noise.dt
    z, zi = ctx.zmat, ctx.zmat_inv
    gen_rot = 0.5 * z @ np.diag([1j, -1j]) @ zi
    gen_up = 0.5 * z @ np.array([[0.0, 1.0], [0.0, 0.0]]) @ zi
    gen_dn = 0.5 * z @ np.array([[0.0, 0.0], [1.0, 0.0]]) @ zi
    m = noise.steps
    qs = np.empty((m + 1, 2, 2), dtype=np.complex128)
    qs[0] = np.eye(2)
    for k in range(m):
        gen = (
            gen_rot * (lam * dt + noise.db[k])
            + gen_up * noise.dw[k]
            + gen_dn * np.conj(noise.dw[k])
        )
        qs[k + 1] = qs[k] + gen @ qs[k]
    return qs


@dataclass(frozen=True)
class PathFunctional:
    """Bounded test functional G(lam, path) = weight(lam) * value(path)."""

    name: str
    description: str
    lam_weight: Callable
    lam_integral: Callable
    path_value: Optional[Callable]  # None means the functional ignores the path


def _overlap(lo, hi, a, b):
    return max(0.0, min(hi, b) - max(lo, a))


def _mid_value(times, path_vals):
    total = times[-1]
    idx = int(np.argmin(np.abs(times - 0.5 * total)))
    return min(1.0, float(path_vals[idx]))


G_FUNCTIONALS = {
    "one": PathFunctional(
        name="one",
        description="G = 1: counts roots in the window",
        lam_weight=lambda lam: 1.0,
        lam_integral=lambda lo, hi: hi - lo,
        path_value=None,
    ),
    "indicator_0_pi": PathFunctional(
        name="indicator_0_pi",
        description="G = 1 on {lam in [0, pi)}: spectral-offset marginal",
        lam_weight=lambda lam: 1.0 if 0.0 <= lam < np.pi else 0.0,
        lam_integral=lambda lo, hi: _overlap(lo, hi, 0.0, np.pi),
        path_value=None,
    ),
    "min_mid": PathFunctional(
        name="min_mid",
        description="G = min(1, squared-mass path at mid horizon)",
        lam_weight=lambda lam: 1.0,
        lam_integral=lambda lo, hi: hi - lo,
        path_value=_mid_value,
    ),
}


@dataclass(frozen=True)
class IntensityResult:
    functional: str
    lhs: float
    rhs: float
    stderr: float
    trials: int


def intensity_check(tau, window, functional, trials, seed, dt=None, rhs_trials=None, threads=1):
    """Two independent estimates of the point-process intensity identity.

    lhs: Monte Carlo mean over realizations of
    sum_{roots} G(root, exp(log-mass profile)), with a uniform lattice
    phase per realization.  rhs: the candidate closed form
    (1/2pi) * integral over the window of E G(lam, exp(B/sqrt(2) + f^u/2))
    with u uniform on [0, tau] and f^u(t) = (u - |u - t|)/2, estimated by
    independent sampling (exact when G ignores the path).  Returns
    (lhs, rhs, combined standard error).
    """
    if isinstance(functional, str):
        try:
            functional = G_FUNCTIONALS[functional]
        except KeyError:
            raise ValueError(
                f"unknown functional {functional!r}; choose from {sorted(G_FUNCTIONALS)}"
            ) from None
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if dt is None:
        dt = tau / 5000.0
    lo, hi = (float(window[0]), float(window[1]))
    needs_path = functional.path_value is not None

    def one_trial(t):
        rng = rng_stream(seed, t, 0)
        phase = rng.uniform(0.0, TWO_PI)
        noise = NoiseRealization.sample(tau, dt, rng)
        spect = sample_limit_spectrum(
            tau, (lo, hi), phase, noise, with_profiles=needs_path
        )
        total = 0.0
        for i, root in enumerate(spect.roots):
            w = functional.lam_weight(float(root))
            if w == 0.0:
                continue
            if needs_path:
                w *= functional.path_value(
                    spect.times, np.exp(spect.log_mass_profiles[i])
                )
            total += w
        return total

    lhs_samples = np.array(run_trials(one_trial, trials, threads))
    lhs = float(lhs_samples.mean())
    se_lhs = float(lhs_samples.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0

    base = functional.lam_integral(lo, hi) / TWO_PI
    if not needs_path:
        rhs = base
        se_rhs = 0.0
    else:
        n_rhs = trials if rhs_trials is None else int(rhs_trials)
        m = max(1, int(round(tau / dt)))
        times = (tau / m) * np.arange(m + 1)

        def one_rhs(t):
            rng = rng_stream(seed, t, 1)
            u = rng.uniform(0.0, tau)
            binc = rng.normal(0.0, math.sqrt(tau / m), m)
            bpath = np.concatenate([[0.0], np.cumsum(binc)])
            tilt = 0.5 * (u - np.abs(u - times))
            vals = np.exp(bpath / np.sqrt(2.0) + 0.5 * tilt)
            return functional.path_value(times, vals)

        rhs_samples = np.array(run_trials(one_rhs, n_rhs, threads))
        rhs = base * float(rhs_samples.mean())
        se_rhs = (
            base * float(rhs_samples.std(ddof=1) / np.sqrt(n_rhs))
            if n_rhs > 1
            else 0.0
        )
    stderr = float(np.hypot(se_lhs, se_rhs))
    return IntensityResult(
        functional=functional.name, lhs=lhs, rhs=rhs, stderr=stderr, trials=trials
    )


def first_root_above(tau, lower, phase, noise, tol=1e-8):
    """Smallest root strictly above ``lower``, extending the search window."""
    length = 16.0 * np.pi
    for _ in range(5):
        spect = sample_limit_spectrum(
            tau,
            (lower, lower + length),
            phase,
            noise,
            tol=tol,
            with_profiles=False,
            stop_after=3,
        )
        cand = spect.roots[spect.roots > lower]
        if cand.size:
            return float(cand[0])
        length *= 2.0
    raise RuntimeError("no root found; the phase path barely moves")


def translation_invariance_test(tau, u, trials, seed, phase=0.0, dt=None, threads=1):
    """Two-sample KS distance probing translation invariance of the roots.

    Sample A: smallest positive element of (root set at ``phase``) + u.
    Sample B: smallest positive root at phase + u, independent noise.
    The two laws agree in the continuum; the statistic should sit at the
    two-sample KS noise floor ~ trials^{-1/2}.
    """
    from .stats import ks_two_sample

    trials = int(trials)
    if trials < 100:
        raise ValueError("need at least 100 trials for a stable KS distance")
    if dt is None:
        dt = tau / 5000.0
    u = float(u)

    def shifted(t):
        noise = NoiseRealization.sample(tau, dt, rng_stream(seed, t, 0))
        return first_root_above(tau, -u, phase, noise) + u

    def reference(t):
        noise = NoiseRealization.sample(tau, dt, rng_stream(seed, t, 1))
        return first_root_above(tau, 0.0, phase + u, noise)

    a = np.array(run_trials(shifted, trials, threads))
    b = np.array(run_trials(reference, trials, threads))
    return ks_two_sample(a, b)
