"""Compiled inner loops shared across the package.

Kernels take plain float64 arrays and scalars only, carry no Python state,
and are compiled without fastmath, so results are bit-reproducible and the
``nogil`` variants can run concurrently under a thread pool.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def sturm_counts(diag, shifts):
    """Eigenvalues strictly below each shift, for unit off-diagonals.

    Shifted-pivot recursion d_k = (diag_k - x) - 1/d_{k-1}; the count of
    negative pivots is the count of eigenvalues below x.  Zero pivots are
    flushed to +-1e-300 preserving the sign bit so no division blows up.
    """
    n = diag.shape[0]
    m = shifts.shape[0]
    out = np.empty(m, dtype=np.int64)
    for j in range(m):
        x = shifts[j]
        count = 0
        d = diag[0] - x
        if d == 0.0:
            d = np.copysign(1e-300, d)
        if d < 0.0:
            count += 1
        for k in range(1, n):
            d = (diag[k] - x) - 1.0 / d
            if d == 0.0:
                d = np.copysign(1e-300, d)
            if d < 0.0:
                count += 1
        out[j] = count
    return out


@njit(cache=True, nogil=True)
def top_entry_path(diag, mu):
    """Top-left entries of the ordered step products, lengths 0..n.

    out[l] solves out[l] = (mu - diag[l-1])*out[l-1] - out[l-2] with
    out[0] = 1 and out[-1] treated as 0; this is both the unnormalized
    eigenvector recursion and the eigenvalue condition path.
    """
    n = diag.shape[0]
    out = np.empty(n + 1)
    out[0] = 1.0
    prev = 0.0
    cur = 1.0
    for k in range(n):
        nxt = (mu - diag[k]) * cur - prev
        prev = cur
        cur = nxt
        out[k + 1] = cur
    return out


@njit(cache=True, nogil=True)
def phase_finals(lams, dt, db, dwr, dwi):
    """Terminal phase for a batch of drift parameters under shared noise.

    Euler scheme for d(theta) = lam*dt + dB + Im(e^{-i theta} dW); returns
    (theta at T, largest single-step |increment| seen per batch entry).
    """
    m = db.shape[0]
    nl = lams.shape[0]
    theta = np.zeros(nl)
    maxstep = np.zeros(nl)
    for k in range(m):
        b = db[k]
        wr = dwr[k]
        wi = dwi[k]
        for j in range(nl):
            c = np.cos(theta[j])
            s = np.sin(theta[j])
            step = lams[j] * dt + b + (wi * c - wr * s)
            theta[j] += step
            a = abs(step)
            if a > maxstep[j]:
                maxstep[j] = a
    return theta, maxstep


@njit(cache=True, nogil=True)
def phase_mass_paths(lams, dt, db, dwr, dwi):
    """Phase, log-mass, and phase-slope paths for a batch of parameters.

    Shared noise across the batch.  Euler scheme for the coupled system
        d(theta) = lam*dt + dB + Im(e^{-i theta} dW)
        d(r)     = dt/4        + Re(e^{-i theta} dW)
        d(phi)   = dt          - Re(e^{-i theta} dW) * phi
    Rows are batch entries, columns the time grid including t=0.
    """
    m = db.shape[0]
    nl = lams.shape[0]
    theta = np.zeros((nl, m + 1))
    logmass = np.zeros((nl, m + 1))
    slope = np.zeros((nl, m + 1))
    for k in range(m):
        b = db[k]
        wr = dwr[k]
        wi = dwi[k]
        for j in range(nl):
            c = np.cos(theta[j, k])
            s = np.sin(theta[j, k])
            re = wr * c + wi * s
            im = wi * c - wr * s
            theta[j, k + 1] = theta[j, k] + lams[j] * dt + b + im
            logmass[j, k + 1] = logmass[j, k] + 0.25 * dt + re
            slope[j, k + 1] = slope[j, k] + dt - re * slope[j, k]
    return theta, logmass, slope


@njit(cache=True, nogil=True)
def mass_finals_batch(lam, dt, db, dwr, dwi):
    """Terminal log-mass r(T) for a batch of independent realizations (rows)."""
    nb = db.shape[0]
    m = db.shape[1]
    out = np.empty(nb)
    for i in range(nb):
        theta = 0.0
        r = 0.0
        for k in range(m):
            c = np.cos(theta)
            s = np.sin(theta)
            re = dwr[i, k] * c + dwi[i, k] * s
            im = dwi[i, k] * c - dwr[i, k] * s
            theta += lam * dt + db[i, k] + im
            r += 0.25 * dt + re
        out[i] = r
    return out


def warm_up():
    """Trigger compilation of all kernels on tiny inputs."""
    diag = np.zeros(2)
    sturm_counts(diag, np.array([0.5]))
    top_entry_path(diag, 0.5)
    one = np.zeros(1)
    phase_finals(np.array([1.0]), 0.5, one, one, one)
    phase_mass_paths(np.array([1.0]), 0.5, one, one, one)
    mass_finals_batch(1.0, 0.5, one[None, :], one[None, :], one[None, :])
