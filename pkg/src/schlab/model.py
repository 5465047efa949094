"""Random band ensemble and energy-indexed derived constants.

The model is the n x n symmetric tridiagonal matrix with unit
off-diagonals and diagonal entries sigma * omega_k / sqrt(n), where the
omega_k are i.i.d. with mean 0, variance 1, and finite third absolute
moment.  Energies strictly inside (-2, 2) carry a family of derived
quantities (band density factor, diffusion horizon, diagonalizing basis
of the clean one-step matrix) bundled in :class:`EnergyContext`.
"""

from dataclasses import dataclass

import numpy as np

from .util import rng_stream

NOISE_FAMILIES = ("rademacher", "gaussian", "uniform")

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class NoiseSpec:
    """Distribution of the i.i.d. diagonal noise variables.

    All families have mean 0 and variance exactly 1; ``uniform`` is
    uniform on [-sqrt(3), sqrt(3)] so that its variance is 1.
    """

    family: str = "gaussian"

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise ValueError(
                f"unknown noise family {self.family!r}; choose from {NOISE_FAMILIES}"
            )

    def sample(self, rng, size):
        """Draw ``size`` i.i.d. variates using generator ``rng``."""
        if self.family == "rademacher":
            return 2.0 * rng.integers(0, 2, size=size).astype(np.float64) - 1.0
        if self.family == "gaussian":
            return rng.standard_normal(size)
        return rng.uniform(-_SQRT3, _SQRT3, size=size)


@dataclass(frozen=True)
class ModelParams:
    """Size, noise strength, and master seed of one ensemble member."""

    n: int
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TridiagModel:
    """Realized diagonal of the band matrix; off-diagonals are implicitly 1."""

    diag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=np.float64)
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("diag must be a nonempty 1-D array")
        if not np.all(np.isfinite(diag)):
            raise ValueError("diag entries must be finite")
        object.__setattr__(self, "diag", diag)

    @property
    def n(self):
        return self.diag.size

    @property
    def scale(self):
        """Spectral-radius bound 2 + max |diag|, used for tolerances."""
        return 2.0 + float(np.max(np.abs(self.diag)))

    def dense(self):
        """Dense symmetric matrix, for small-n cross checks."""
        h = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        h[idx, idx + 1] = 1.0
        h[idx + 1, idx] = 1.0
        return h


@dataclass(frozen=True)
class EnergyContext:
    """Constants attached to an energy E with |E| < 2.

    rho is the arcsine-law factor 1/sqrt(1 - E^2/4); tau = (sigma*rho)^2
    is the horizon of the limiting diffusions; z = E/2 + i sqrt(1 - E^2/4)
    is the unimodular eigenvalue of the clean step matrix [[E,-1],[1,0]],
    and zmat @ dmat @ zmat_inv reproduces that matrix.  zmat maps (1, 1)
    to the recursion start (1, 0).
    """

    energy: float
    rho: float
    tau: float
    z: complex
    zmat: np.ndarray
    zmat_inv: np.ndarray
    dmat: np.ndarray


def arcsine_rho(energy):
    """Arcsine density factor 1/sqrt(1 - E^2/4) for |E| < 2.

    The limiting eigenvalue density at E is rho(E)/(2*pi); spacings near E
    shrink like 1/(n*rho(E)).
    """
    e = float(energy)
    if not abs(e) < 2.0:
        raise ValueError(f"energy must satisfy |E| < 2, got {e}")
    return 1.0 / np.sqrt(1.0 - 0.25 * e * e)


def energy_context(energy, sigma):
    """Bundle rho, tau and the diagonalizing basis at one energy."""
    e = float(energy)
    rho = arcsine_rho(e)
    half_gap = np.sqrt(1.0 - 0.25 * e * e)
    z = complex(0.5 * e, half_gap)
    zmat = 0.5j * rho * np.array([[np.conj(z), -z], [1.0, -1.0]], dtype=np.complex128)
    zmat_inv = np.array([[1.0, -z], [1.0, -np.conj(z)]], dtype=np.complex128)
    dmat = np.array([[np.conj(z), 0.0], [0.0, z]], dtype=np.complex128)
    tau = (float(sigma) * rho) ** 2
    return EnergyContext(e, float(rho), float(tau), z, zmat, zmat_inv, dmat)


def sample_model(params, noise):
    """Draw one model realization; pure function of (params, noise).

    diag[k] = sigma * omega_k / sqrt(n), with omega from the noise family
    on the stream derived from params.seed.
    """
    rng = rng_stream(params.seed)
    omega = noise.sample(rng, params.n)
    diag = params.sigma * omega / np.sqrt(params.n)
    return TridiagModel(diag=diag)
