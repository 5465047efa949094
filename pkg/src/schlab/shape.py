"""Eigenvector mass profiles on the unit interval.

The squared entries of a normalized eigenvector define a probability
measure on [0, 1] (entry l spreads its mass over [(l-1)/n, l/n)).  That
measure, binned, is the object that converges to the universal
exponential-with-Brownian-roughness profile, so everything downstream
(peak location, log-density decay slopes) runs on :class:`ShapeMeasure`.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShapeMeasure:
    """Piecewise-constant probability density on [0, 1].

    bins holds density values at the bin centers; the total mass
    sum(bins)/bin_count is 1 to within rounding and entries are >= 0.
    """

    bins: np.ndarray

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.float64)
        if bins.ndim != 1 or bins.size < 1:
            raise ValueError("bins must be a nonempty 1-D array")
        object.__setattr__(self, "bins", bins)

    @property
    def bin_count(self):
        return self.bins.size

    @property
    def centers(self):
        b = self.bin_count
        return (np.arange(b) + 0.5) / b

    def mass(self):
        return float(np.sum(self.bins)) / self.bin_count


def shape_measure(pair, bin_count):
    """Binned mass density of an eigenvector, exact by construction.

    Entry l contributes psi(l)^2 spread uniformly over its index cell
    [(l-1)/n, l/n); bin j integrates the cells overlapping
    [j/b, (j+1)/b).  Splitting straddling cells proportionally keeps the
    total mass exactly 1 and makes a flat vector produce exactly flat
    bins for any (n, b) combination.
    """
    psi = np.asarray(pair.psi, dtype=np.float64)
    n = psi.size
    b = int(bin_count)
    if not 1 <= b <= n:
        raise ValueError(f"bin_count must be in [1, n={n}]")
    mass = psi * psi
    cum = np.concatenate([[0.0], np.cumsum(mass)])

    def cum_at(t):
        # integrated mass on [0, t], linear inside each index cell
        pos = t * n
        cell = np.minimum(pos.astype(np.int64), n - 1)
        return cum[cell] + (pos - cell) * mass[cell]

    edges = np.arange(b + 1) / b
    cdf = cum_at(edges)
    cdf[-1] = cum[-1]
    bins = b * np.diff(cdf)
    return ShapeMeasure(bins=np.maximum(bins, 0.0))


def peak(measure, window=None):
    """Center of the moving-average maximizer of the bins, in [0, 1].

    ``window`` is the moving-average length in bins (default
    max(1, bin_count // 16)); ties resolve to the smallest index.
    """
    b = measure.bin_count
    if window is None:
        window = max(1, b // 16)
    window = int(window)
    if not 1 <= window <= b:
        raise ValueError(f"window must be in [1, bin_count={b}]")
    sums = np.convolve(measure.bins, np.ones(window), mode="valid")
    j = int(np.argmax(sums))
    return (j + 0.5 * window) / b


def log_profile(measure, peak_location):
    """(distance from peak, log density) pairs for decay-rate regression.

    Zero bins are skipped rather than floored, so fitting the pairs never
    sees an artificial -inf plateau.  Returns an (k, 2) array.
    """
    bins = measure.bins
    mask = bins > 0.0
    skipped = int(np.sum(~mask))
    if skipped:
        logger.debug("log_profile: skipped %d empty bins", skipped)
    centers = measure.centers[mask]
    return np.column_stack(
        [np.abs(centers - float(peak_location)), np.log(bins[mask])]
    )


def fit_decay_slope(profile):
    """Least-squares slope of log density against distance from the peak."""
    profile = np.asarray(profile, dtype=np.float64)
    if profile.shape[0] < 2:
        return float("nan")
    d = profile[:, 0]
    y = profile[:, 1]
    dm = d - d.mean()
    denom = float(np.dot(dm, dm))
    if denom == 0.0:
        return float("nan")
    return float(np.dot(dm, y - y.mean()) / denom)
