"""Transfer-matrix products, the eigenvalue condition, and regularized paths.

The eigenvalue recursion psi(l+1) = (mu - v_l) psi(l) - psi(l-1) is the
ordered product of one-step matrices T(x) = [[x, -1], [1, 0]].  mu is an
eigenvalue exactly when the top-left entry of the full product vanishes.
Removing the deterministic band rotation from the product (multiplying by
T(E)^{-l}) yields paths that stay O(1) at critical noise scaling and admit
a diffusion limit.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import arcsine_rho

OVERFLOW_LIMIT = 1e150
_RESCALE_LIMIT = 1e120


class TransferOverflowError(OverflowError):
    """Entries exceeded the overflow guard; use the scaled variant."""


def t_step(x):
    """One-step matrix [[x, -1], [1, 0]]; determinant is exactly 1."""
    if not np.isfinite(x):
        raise ValueError("step argument must be finite")
    return np.array([[float(x), -1.0], [1.0, 0.0]])


def t_step_power(energy, m):
    """T(E)^m for any integer m, via the unimodular rotation angle.

    With alpha = arccos(E/2) and rho = 1/sin(alpha),
        T(E)^m = rho * [[sin((m+1) a), -sin(m a)], [sin(m a), -sin((m-1) a)]],
    which keeps the rotation exactly on the unit circle instead of letting
    repeated multiplication drift.
    """
    rho = arcsine_rho(energy)
    alpha = np.arccos(0.5 * float(energy))
    m = int(m)
    return rho * np.array(
        [
            [np.sin((m + 1) * alpha), -np.sin(m * alpha)],
            [np.sin(m * alpha), -np.sin((m - 1) * alpha)],
        ]
    )


def _check_range(model, ell):
    if not 0 <= ell <= model.n:
        raise ValueError(f"ell must be in [0, {model.n}], got {ell}")


def transfer_product(model, mu, ell):
    """Ordered product T(mu - v_ell) ... T(mu - v_1); identity for ell = 0.

    Raises :class:`TransferOverflowError` once any entry leaves
    [-1e150, 1e150]; callers needing longer products should use
    :func:`transfer_product_scaled`.
    """
    _check_range(model, ell)
    mu = float(mu)
    a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
    diag = model.diag
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(int(ell)):
            x = mu - diag[k]
            a11, a12, a21, a22 = x * a11 - a21, x * a12 - a22, a11, a12
            if k % 32 == 31:
                big = max(abs(a11), abs(a12), abs(a21), abs(a22))
                if not big <= OVERFLOW_LIMIT:  # catches inf and nan
                    raise TransferOverflowError(
                        f"transfer entries exceeded {OVERFLOW_LIMIT:g} at step {k + 1}"
                    )
    m = np.array([[a11, a12], [a21, a22]])
    if not np.max(np.abs(m)) <= OVERFLOW_LIMIT or not np.all(np.isfinite(m)):
        raise TransferOverflowError(f"transfer entries exceeded {OVERFLOW_LIMIT:g}")
    return m


def transfer_product_scaled(model, mu, ell):
    """Like :func:`transfer_product` but returns (matrix, log_scale).

    The true product is matrix * exp(log_scale); the running factor is
    peeled off whenever entries grow past 1e120, so products of any length
    stay representable.
    """
    _check_range(model, ell)
    mu = float(mu)
    a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
    log_scale = 0.0
    diag = model.diag
    for k in range(int(ell)):
        x = mu - diag[k]
        a11, a12, a21, a22 = x * a11 - a21, x * a12 - a22, a11, a12
        big = max(abs(a11), abs(a12), abs(a21), abs(a22))
        if big > _RESCALE_LIMIT:
            a11, a12, a21, a22 = a11 / big, a12 / big, a21 / big, a22 / big
            log_scale += np.log(big)
    return np.array([[a11, a12], [a21, a22]]), log_scale


def transfer_norm_sums(model, mus, power=2.0):
    """sum_{l=1..n} ||M(mu, l)||^power (Hilbert-Schmidt), batched over mus.

    Feeds the eigenvalue spacing lower bound (power=2) and the
    window-count inequality (power=2+2*beta).
    """
    mus = np.atleast_1d(np.asarray(mus, dtype=np.float64))
    a11 = np.ones_like(mus)
    a12 = np.zeros_like(mus)
    a21 = np.zeros_like(mus)
    a22 = np.ones_like(mus)
    total = np.zeros_like(mus)
    half = 0.5 * float(power)
    for vk in model.diag:
        x = mus - vk
        a11, a12, a21, a22 = x * a11 - a21, x * a12 - a22, a11, a12
        sq = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22
        total += sq if half == 1.0 else sq**half
    return total


def eigen_condition(model, mu):
    """Top-left entry of the full product; zero exactly at eigenvalues."""
    path = _kernels.top_entry_path(model.diag, float(mu))
    if not np.all(np.isfinite(path)) or np.max(np.abs(path)) > OVERFLOW_LIMIT:
        raise TransferOverflowError(
            "eigenvalue-condition recursion overflowed; use eigen_condition_scaled"
        )
    return float(path[-1])


def eigen_condition_scaled(model, mu):
    """(scaled value, log_scale) with true value = scaled * exp(log_scale)."""
    mu = float(mu)
    prev, cur = 0.0, 1.0
    log_scale = 0.0
    for vk in model.diag:
        prev, cur = cur, (mu - vk) * cur - prev
        big = max(abs(prev), abs(cur))
        if big > _RESCALE_LIMIT:
            prev /= big
            cur /= big
            log_scale += np.log(big)
    return cur, log_scale


@dataclass(frozen=True)
class RegularizedPath:
    """Band-rotation-free transfer path at one spectral offset.

    steps[l] = T(E)^{-l} @ M(mu, l) with mu = E + lam/(rho(E) n); steps[0]
    is the identity and every step has determinant 1 up to rounding.
    """

    lam: float
    energy: float
    steps: np.ndarray


def regularized_path(model, ctx, lam):
    """Regularized transfer path for spectral offset ``lam`` around ctx.energy."""
    n = model.n
    mu = ctx.energy + float(lam) / (ctx.rho * n)
    diag = model.diag

    mpath = np.empty((n + 1, 2, 2))
    mpath[0] = np.eye(2)
    a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
    for k in range(n):
        x = mu - diag[k]
        a11, a12, a21, a22 = x * a11 - a21, x * a12 - a22, a11, a12
        mpath[k + 1, 0, 0] = a11
        mpath[k + 1, 0, 1] = a12
        mpath[k + 1, 1, 0] = a21
        mpath[k + 1, 1, 1] = a22

    # T(E)^{-l} for l = 0..n, assembled from the exact rotation angle.
    alpha = np.arccos(0.5 * ctx.energy)
    ells = -np.arange(n + 1)
    tinv = ctx.rho * np.stack(
        [
            np.stack([np.sin((ells + 1) * alpha), -np.sin(ells * alpha)], axis=-1),
            np.stack([np.sin(ells * alpha), -np.sin((ells - 1) * alpha)], axis=-1),
        ],
        axis=-2,
    )
    steps = np.einsum("lij,ljk->lik", tinv, mpath)
    steps[0] = np.eye(2)  # empty product, exactly
    return RegularizedPath(lam=float(lam), energy=ctx.energy, steps=steps)


def transfer_mass_density(model, ctx, lam, bins):
    """Binned squared-top-entry density over the scaled time axis [0, tau].

    Bin j is sampled at its center t_j = (j + 1/2) tau / bins through the
    piecewise-constant map l = floor(n t / tau); values are
    |(2/rho) M(mu, l)_{11}|^2, matching the piecewise-constant integrand.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if ctx.tau <= 0:
        raise ValueError("context horizon tau must be positive (sigma > 0)")
    n = model.n
    mu = ctx.energy + float(lam) / (ctx.rho * n)
    path = _kernels.top_entry_path(model.diag, mu)
    centers = (np.arange(int(bins)) + 0.5) * ctx.tau / int(bins)
    idx = np.minimum((n * centers / ctx.tau).astype(np.int64), n)
    vals = (2.0 / ctx.rho) * path[idx]
    return vals * vals
