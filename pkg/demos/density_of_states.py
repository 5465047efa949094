"""Pooled eigenvalue histogram against the arcsine law.

The empirical spectrum of the critically-scaled ensemble converges to
the arcsine density rho(E)/(2 pi) on (-2, 2); this script pools a few
spectra and overlays the limit.

Run:  python3 demos/density_of_states.py
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import schlab as sl
from schlab.experiments import pooled_spectrum

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

params = sl.ModelParams(n=2000, sigma=1.0, seed=1)
pooled = pooled_spectrum(params, sl.NoiseSpec("gaussian"), trials=10)
summary = sl.dos_check(params, sl.NoiseSpec("gaussian"), trials=10)
print(f"pooled {summary.sample_count} eigenvalues, KS vs arcsine = "
      f"{summary.ks_vs_reference:.4f}")

grid = np.linspace(-1.999, 1.999, 400)
reference = np.array([sl.arcsine_rho(e) for e in grid]) / (2 * np.pi)

fig, ax = plt.subplots(figsize=(8, 5))
ax.hist(pooled, bins=100, density=True, alpha=0.6, label="pooled spectra")
ax.plot(grid, reference, "r-", lw=2, label="arcsine density")
ax.set_xlabel("energy")
ax.set_ylabel("density")
ax.set_title(f"n={params.n}, sigma={params.sigma}, 10 trials, "
             f"KS={summary.ks_vs_reference:.4f}")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "density_of_states.png", dpi=120)
print(f"wrote {OUT / 'density_of_states.png'}")
