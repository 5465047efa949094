import numpy as np
import pytest

from schlab import (
    ModelParams,
    NoiseSpec,
    ShapeMeasure,
    SpectralPair,
    eigenvalue_by_index,
    eigenvector,
    fit_decay_slope,
    log_profile,
    peak,
    sample_model,
    shape_measure,
)


def pair_from(psi):
    psi = np.asarray(psi, dtype=np.float64)
    return SpectralPair(mu=0.0, psi=psi / np.linalg.norm(psi), index=0)


class TestShapeMeasure:
    def test_point_mass(self):
        meas = shape_measure(pair_from([1.0, 0, 0, 0, 0, 0, 0]), 4)
        assert np.array_equal(meas.bins, np.array([4.0, 0.0, 0.0, 0.0]))

    def test_flat_any_bin_count(self):
        for n, b in ((101, 10), (64, 64), (100, 7)):
            meas = shape_measure(pair_from(np.ones(n)), b)
            assert np.max(np.abs(meas.bins - 1.0)) <= 1e-9

    def test_clean_sine_mode_is_flat(self):
        n, k = 101, 50
        psi = np.sin(np.pi * k * np.arange(1, n + 1) / (n + 1))
        meas = shape_measure(pair_from(psi), 10)
        assert np.max(np.abs(meas.bins - 1.0)) <= 0.15

    def test_mass_is_one(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(4, 200))
            b = int(rng.integers(1, n + 1))
            meas = shape_measure(pair_from(rng.standard_normal(n)), b)
            assert meas.mass() == pytest.approx(1.0, abs=1e-10)
            assert np.all(meas.bins >= 0.0)

    def test_sign_flip_invariance(self):
        rng = np.random.default_rng(5)
        psi = rng.standard_normal(64)
        a = shape_measure(pair_from(psi), 16)
        b = shape_measure(pair_from(-psi), 16)
        assert np.array_equal(a.bins, b.bins)

    def test_refinement_coarsening(self):
        rng = np.random.default_rng(7)
        n, k = 96, 8  # 2k divides n
        psi = rng.standard_normal(n)
        fine = shape_measure(pair_from(psi), 2 * k)
        coarse = shape_measure(pair_from(psi), k)
        averaged = 0.5 * (fine.bins[0::2] + fine.bins[1::2])
        assert np.max(np.abs(averaged - coarse.bins)) <= 1e-12

    def test_bin_count_validation(self):
        with pytest.raises(ValueError):
            shape_measure(pair_from(np.ones(4)), 5)
        with pytest.raises(ValueError):
            shape_measure(pair_from(np.ones(4)), 0)

    def test_mass_preserved_from_solver(self):
        model = sample_model(ModelParams(n=150, sigma=2.0, seed=13), NoiseSpec("gaussian"))
        mu = eigenvalue_by_index(model, 75)
        meas = shape_measure(eigenvector(model, mu), 32)
        assert meas.mass() == pytest.approx(1.0, abs=1e-10)


class TestPeak:
    def test_point_mass_first_bin(self):
        assert peak(ShapeMeasure(np.array([4.0, 0, 0, 0])), 1) == 0.125

    def test_flat_tie_break(self):
        assert peak(ShapeMeasure(np.ones(8)), 1) == pytest.approx(1.0 / 16.0)

    def test_window_validation(self):
        with pytest.raises(ValueError):
            peak(ShapeMeasure(np.ones(8)), 9)

    def test_default_window(self):
        bins = np.zeros(64)
        bins[40] = 64.0
        # default window 4: maximizer covers bins 37..40 through 40..43
        assert abs(peak(ShapeMeasure(bins)) - 40.5 / 64.0) <= 4.0 / 64.0


class TestLogProfile:
    def test_exact_exponential_slope(self):
        tau, u, b = 6.0, 0.4375, 64
        centers = (np.arange(b) + 0.5) / b
        bins = np.exp(-tau * np.abs(centers - u) / 4.0)
        bins /= bins.sum() / b
        prof = log_profile(ShapeMeasure(bins), u)
        assert fit_decay_slope(prof) == pytest.approx(-tau / 4.0, abs=1e-6)

    def test_flat_slope_zero(self):
        prof = log_profile(ShapeMeasure(np.ones(32)), 0.5)
        assert fit_decay_slope(prof) == pytest.approx(0.0, abs=1e-12)

    def test_zero_bins_skipped(self):
        bins = np.array([2.0, 0.0, 1.0, 1.0])
        prof = log_profile(ShapeMeasure(bins), 0.125)
        assert prof.shape == (3, 2)
        assert np.all(np.isfinite(prof))

    def test_degenerate_profiles(self):
        assert np.isnan(fit_decay_slope(np.empty((0, 2))))
        assert np.isnan(fit_decay_slope(np.array([[0.3, 1.0]])))
