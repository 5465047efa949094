"""Eigenvalues and eigenvectors of the band model.

Eigenvalues come from bisection on the Sturm pivot count, so each one is
certified by a bracket.  Eigenvectors use the forward three-term
recursion (exact in real arithmetic) and fall back to inverse iteration
when the recursion loses accuracy in floating point, which it does for
strongly localized states.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded, LinAlgError

from . import _kernels
from .model import arcsine_rho
from .util import rng_stream

RESIDUAL_RTOL = 1e-8


class EigenvectorResidualError(RuntimeError):
    """Raised when no candidate eigenvector meets the residual bound."""


@dataclass(frozen=True)
class SpectralPair:
    """Eigenvalue with its unit eigenvector and rank in the sorted spectrum.

    psi has unit l2 norm, its first nonzero entry is positive, and the
    residual ||H psi - mu psi||_inf is at most 1e-8 * (2 + max|diag|).
    """

    mu: float
    psi: np.ndarray
    index: int


def sturm_count(model, x):
    """Number of eigenvalues strictly below ``x``."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("shift must be finite")
    return int(_kernels.sturm_counts(model.diag, np.array([x]))[0])


def _bisect_indices(model, ks, lo, hi, tol):
    """Bisect brackets [lo, hi] for the 0-based eigenvalue ranks ``ks``."""
    ks = np.asarray(ks, dtype=np.int64)
    lo = np.asarray(lo, dtype=np.float64).copy()
    hi = np.asarray(hi, dtype=np.float64).copy()
    for _ in range(200):
        if np.max(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        counts = _kernels.sturm_counts(model.diag, mid)
        above = counts > ks
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def eigenvalues(model, tol=None):
    """All eigenvalues, sorted, each bracketed to width <= tol.

    Default tol is 1e-12 * (2 + max|diag|), relative to the Gershgorin
    spectral radius.
    """
    if tol is None:
        tol = 1e-12 * model.scale
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = model.n
    bound = model.scale
    ks = np.arange(n)
    return _bisect_indices(model, ks, np.full(n, -bound), np.full(n, bound), tol)


def eigenvalue_by_index(model, index, tol=None):
    """The eigenvalue of 0-based rank ``index`` in the sorted spectrum."""
    if not 0 <= index < model.n:
        raise ValueError(f"index must be in [0, {model.n})")
    if tol is None:
        tol = 1e-12 * model.scale
    bound = model.scale
    return float(_bisect_indices(model, [index], [-bound], [bound], tol)[0])


def eigenvalues_in_interval(model, lo, hi, tol=None):
    """Sorted eigenvalues in [lo, hi), each bracketed to width <= tol."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if tol is None:
        tol = 1e-12 * model.scale
    c_lo, c_hi = _kernels.sturm_counts(model.diag, np.array([lo, hi]))
    ks = np.arange(c_lo, c_hi)
    if ks.size == 0:
        return np.empty(0)
    return _bisect_indices(model, ks, np.full(ks.size, lo), np.full(ks.size, hi), tol)


def _residual(model, mu, psi):
    h_psi = model.diag * psi
    h_psi[:-1] += psi[1:]
    h_psi[1:] += psi[:-1]
    return float(np.max(np.abs(h_psi - mu * psi)))


def _normalize_sign(psi):
    norm = np.linalg.norm(psi)
    psi = psi / norm
    for value in psi:
        if value != 0.0:
            if value < 0.0:
                psi = -psi
            break
    return psi


def _inverse_iteration(model, mu):
    """Two inverse-iteration steps from a seeded random start.

    The start vector is a pure function of (diag size, mu bits) so the
    result is reproducible.  An exactly singular shift is nudged by one
    part in 1e13 of the spectral scale.
    """
    n = model.n
    seed = int(np.frombuffer(np.float64(mu).tobytes(), dtype=np.uint64)[0])
    rng = rng_stream(seed, n, 0xEC)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    shift = mu
    for _ in range(3):
        ab = np.zeros((3, n))
        ab[0, 1:] = 1.0
        ab[1] = model.diag - shift
        ab[2, :-1] = 1.0
        try:
            for _ in range(2):
                w = solve_banded((1, 1), ab, v)
                v = w / np.linalg.norm(w)
            return v
        except LinAlgError:
            shift = shift + 1e-13 * model.scale
    return v


def eigenvector(model, mu):
    """Normalized eigenvector for eigenvalue ``mu`` (known to solver tol).

    psi(l) is proportional to the forward-recursion solution; if that
    candidate fails the residual bound the routine switches to inverse
    iteration and verifies the same bound.  Raises
    :class:`EigenvectorResidualError` when mu is not within tolerance of
    the spectrum.
    """
    mu = float(mu)
    tol = RESIDUAL_RTOL * model.scale
    path = _kernels.top_entry_path(model.diag, mu)
    psi = path[: model.n]
    best = None
    if np.all(np.isfinite(psi)) and np.linalg.norm(psi) > 0:
        cand = _normalize_sign(psi)
        res = _residual(model, mu, cand)
        best = (res, cand)
    if best is None or best[0] > tol:
        cand = _normalize_sign(_inverse_iteration(model, mu))
        res = _residual(model, mu, cand)
        if best is None or res < best[0]:
            best = (res, cand)
    res, psi = best
    if res > tol:
        raise EigenvectorResidualError(
            f"residual {res:.3e} exceeds {tol:.3e}; mu={mu!r} is not within "
            "tolerance of the spectrum"
        )
    index = int(
        _kernels.sturm_counts(model.diag, np.array([mu - 1e-9 * model.scale]))[0]
    )
    index = min(index, model.n - 1)
    return SpectralPair(mu=mu, psi=psi, index=index)


def count_in_window(model, energy, radius):
    """Eigenvalue count in the spacing-scaled window around ``energy``.

    The window is (E - R/(n*rho(E)), E + R/(n*rho(E))), evaluated with two
    Sturm counts.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    rho = arcsine_rho(energy)
    half = radius / (model.n * rho)
    counts = _kernels.sturm_counts(
        model.diag, np.array([energy - half, energy + half])
    )
    return int(counts[1] - counts[0])
