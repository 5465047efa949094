"""Independent dense symmetric eigensolver for cross-checking.

Cyclic Jacobi rotations on the full matrix, sharing no code with the
package's Sturm/transfer machinery.  Accurate to machine precision for
the n <= 64 sizes used in the tests.
"""

import numpy as np


def jacobi_eigh(matrix, sweeps=30, tol=1e-14):
    """Eigenvalues (ascending) and eigenvectors of a symmetric matrix.

    Returns (w, v) with v[:, i] the unit eigenvector for w[i], first
    nonzero component positive.
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * np.sqrt(np.sum(np.diag(a) ** 2) + 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    w = np.diag(a).copy()
    order = np.argsort(w)
    w = w[order]
    v = v[:, order]
    for i in range(n):
        col = v[:, i]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            v[:, i] = -col
    return w, v
