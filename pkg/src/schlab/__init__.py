"""schlab: a numerical laboratory for the critical 1-D random band model.

The package simulates the symmetric tridiagonal ensemble with unit
off-diagonals and diagonal noise of variance sigma^2/n, extracts
eigenvalue/eigenvector statistics, simulates the limiting diffusion
objects (phase/log-mass SDEs, root point process, limit shape), and
provides the statistical machinery to compare the two ends at scale.
"""

__version__ = "0.1.0"

from .model import (
    NoiseSpec,
    ModelParams,
    TridiagModel,
    EnergyContext,
    arcsine_rho,
    energy_context,
    sample_model,
)
from .tridiag import (
    SpectralPair,
    sturm_count,
    eigenvalues,
    eigenvalue_by_index,
    eigenvalues_in_interval,
    eigenvector,
    count_in_window,
)
from .transfer import (
    t_step,
    t_step_power,
    transfer_product,
    transfer_product_scaled,
    transfer_norm_sums,
    eigen_condition,
    eigen_condition_scaled,
    regularized_path,
    transfer_mass_density,
    RegularizedPath,
    TransferOverflowError,
)
from .shape import ShapeMeasure, shape_measure, peak, log_profile, fit_decay_slope
from .sde import (
    NoiseRealization,
    LimitPath,
    LimitSpectrumSample,
    StepSizeError,
    ResourceLimitError,
    simulate_limit_path,
    sample_limit_spectrum,
    sample_limit_shape,
    sample_log_shape,
    simulate_limit_transfer,
    intensity_check,
    translation_invariance_test,
    G_FUNCTIONALS,
)
from .stats import (
    EmpiricalSummary,
    GapComparison,
    arcsine_cdf,
    ks_one_sample,
    ks_two_sample,
    ks_critical_value,
    dos_check,
    gap_statistics,
    shape_mass_comparison,
)
from .util import rng_stream, child_seed, resolve_threads, run_trials
