"""Finite-size eigenvector shapes against the exponential-Brownian limit.

Eigenvectors near a fixed energy decay exponentially from a uniformly
placed peak at rate tau/4 in the unit-interval variable, with Brownian
roughness on top.  This script compares the averaged finite-size
log-profile with matched draws of the limit shape.

Run:  python3 demos/shape_convergence.py
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import schlab as sl
from schlab.experiments import eigenvector_shape_run, fit_profile_slope, limit_shape_run

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

params = sl.ModelParams(n=1000, sigma=4.0, seed=21)
finite = eigenvector_shape_run(
    params, sl.NoiseSpec("gaussian"), trials=200, bins=64,
    select="nearest", energy=0.5,
)
limit = limit_shape_run(finite.taus, seed=22, bins=64)
tau = float(np.mean(finite.taus))

slope_fin = fit_profile_slope(finite, lo=0.2, hi=1.0, min_count=10)
slope_lim = fit_profile_slope(limit, lo=0.0, hi=1.0, min_count=10)
print(f"tau = {tau:.3f}; theoretical decay slope -tau/4 = {-tau / 4:.3f}")
print(f"finite-n far-field slope : {slope_fin:.3f}")
print(f"limit-draw slope         : {slope_lim:.3f}")
ks_fin = sl.ks_one_sample(finite.peaks, lambda x: np.clip(x, 0, 1))
print(f"finite-n peak KS vs uniform: {ks_fin:.4f}")

fig, ax = plt.subplots(figsize=(8, 5))
mask_f = finite.profile_counts > 10
mask_l = limit.profile_counts > 10
ax.plot(finite.profile_distances[mask_f], finite.profile_means[mask_f],
        "o", ms=4, label=f"finite n={params.n}")
ax.plot(limit.profile_distances[mask_l], limit.profile_means[mask_l],
        "s", ms=4, label="limit draws")
d = np.linspace(0, 1, 50)
ax.plot(d, finite.profile_means[mask_f][0] - tau / 4 * d, "k--",
        label=f"slope -tau/4 = {-tau / 4:.2f}")
ax.set_xlabel("distance from peak")
ax.set_ylabel("mean log density")
ax.legend()
ax.set_title(f"eigenvector decay profiles, sigma={params.sigma}, E=0.5")
fig.tight_layout()
fig.savefig(OUT / "shape_convergence.png", dpi=120)
print(f"wrote {OUT / 'shape_convergence.png'}")
