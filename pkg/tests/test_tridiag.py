import numpy as np
import pytest

from dense_oracle import jacobi_eigh
from schlab import (
    ModelParams,
    NoiseSpec,
    TridiagModel,
    child_seed,
    count_in_window,
    eigenvalue_by_index,
    eigenvalues,
    eigenvalues_in_interval,
    eigenvector,
    sample_model,
    sturm_count,
)
from schlab.tridiag import EigenvectorResidualError


def laplacian_model(n):
    return TridiagModel(diag=np.zeros(n))


def seeded_model(n, sigma, seed):
    return sample_model(ModelParams(n=n, sigma=sigma, seed=seed), NoiseSpec("gaussian"))


def exact_clean_spectrum(n):
    return np.sort(2.0 * np.cos(np.pi * np.arange(1, n + 1) / (n + 1)))


class TestSturmCount:
    def test_clean_n3(self):
        assert sturm_count(laplacian_model(3), 1.0) == 2

    def test_spectral_range(self):
        model = seeded_model(40, 2.0, 5)
        assert sturm_count(model, -model.scale) == 0
        assert sturm_count(model, model.scale) == 40

    def test_nondecreasing(self):
        model = seeded_model(30, 1.0, 11)
        xs = np.linspace(-3, 3, 61)
        counts = [sturm_count(model, x) for x in xs]
        assert all(a <= b for a, b in zip(counts, counts[1:]))


class TestEigenvalues:
    def test_clean_n3(self):
        ev = eigenvalues(laplacian_model(3))
        assert np.max(np.abs(ev - np.array([-np.sqrt(2), 0.0, np.sqrt(2)]))) <= 1e-11

    def test_clean_n100(self):
        ev = eigenvalues(laplacian_model(100))
        assert np.max(np.abs(ev - exact_clean_spectrum(100))) <= 1e-11

    def test_matches_dense_oracle_n5(self):
        model = seeded_model(5, 1.0, 3)
        w, _ = jacobi_eigh(model.dense())
        ev = eigenvalues(model, tol=1e-13 * model.scale)
        assert np.max(np.abs(ev - w)) <= 1e-9

    def test_trace_identity(self):
        model = seeded_model(300, 1.5, 17)
        ev = eigenvalues(model)
        assert abs(ev.sum() - model.diag.sum()) <= 1e-8 * model.n

    def test_interlacing_under_truncation(self):
        for n in (4, 6, 8):
            model = seeded_model(n, 1.0, 100 + n)
            sub = TridiagModel(diag=model.diag[: n - 1])
            w_full, _ = jacobi_eigh(model.dense())
            w_sub, _ = jacobi_eigh(sub.dense())
            assert np.all(w_full[:-1] <= w_sub + 1e-12)
            assert np.all(w_sub <= w_full[1:] + 1e-12)

    def test_by_index_and_interval(self):
        model = seeded_model(60, 1.0, 23)
        ev = eigenvalues(model)
        for k in (0, 17, 59):
            assert eigenvalue_by_index(model, k) == pytest.approx(ev[k], abs=1e-10)
        inner = eigenvalues_in_interval(model, -0.5, 0.5)
        expected = ev[(ev >= -0.5) & (ev < 0.5)]
        assert inner.size == expected.size
        assert np.max(np.abs(inner - expected)) <= 1e-10


class TestEigenvector:
    def test_clean_mu_zero(self):
        pair = eigenvector(laplacian_model(3), 0.0)
        expected = np.array([1.0, 0.0, -1.0]) / np.sqrt(2)
        assert np.max(np.abs(pair.psi - expected)) <= 1e-12
        assert pair.index == 1

    def test_clean_mu_sqrt2(self):
        pair = eigenvector(laplacian_model(3), np.sqrt(2.0))
        expected = np.array([0.5, np.sqrt(2) / 2, 0.5])
        assert np.max(np.abs(pair.psi - expected)) <= 1e-12

    def test_matches_dense_oracle_n5(self):
        model = seeded_model(5, 1.0, 29)
        w, v = jacobi_eigh(model.dense())
        ev = eigenvalues(model, tol=1e-13 * model.scale)
        for j, mu in enumerate(ev):
            pair = eigenvector(model, mu)
            err = min(
                np.linalg.norm(pair.psi - v[:, j]), np.linalg.norm(pair.psi + v[:, j])
            )
            assert err <= 1e-6
            assert pair.index == j

    def test_invariants_random(self):
        model = seeded_model(400, 4.0, 31)
        tol = 1e-8 * model.scale
        for k in (0, 100, 399):
            mu = eigenvalue_by_index(model, k)
            pair = eigenvector(model, mu)
            assert np.linalg.norm(pair.psi) == pytest.approx(1.0, abs=1e-10)
            first_nonzero = pair.psi[np.nonzero(pair.psi)[0][0]]
            assert first_nonzero > 0
            h_psi = model.dense() @ pair.psi
            assert np.max(np.abs(h_psi - mu * pair.psi)) <= tol
            assert pair.index == k

    def test_off_spectrum_rejected(self):
        model = seeded_model(50, 1.0, 37)
        ev = eigenvalues(model)
        gap_mid = 0.5 * (ev[20] + ev[21])
        with pytest.raises(EigenvectorResidualError):
            eigenvector(model, gap_mid)

    def test_n1(self):
        model = TridiagModel(diag=np.array([0.7]))
        pair = eigenvector(model, 0.7)
        assert pair.psi[0] == 1.0 and pair.index == 0


class TestCountInWindow:
    def test_clean_n3_small_window(self):
        assert count_in_window(laplacian_model(3), 0.1, 0.1) == 0

    def test_monotone_in_radius(self):
        model = seeded_model(200, 1.0, 41)
        counts = [count_in_window(model, 0.5, r) for r in (0.5, 1, 2, 5, 10, 20)]
        assert all(a <= b for a, b in zip(counts, counts[1:]))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            count_in_window(laplacian_model(3), 2.0, 1.0)
        with pytest.raises(ValueError):
            count_in_window(laplacian_model(3), 0.5, -1.0)

    def test_window_moment_stable_as_n_doubles(self):
        # qualitative: E[((N-1)+)^{3/2}] stays bounded as n doubles
        means = []
        for n in (500, 1000):
            vals = []
            for t in range(800):
                model = seeded_model(n, 1.0, child_seed(4300 + n, t))
                count = count_in_window(model, 0.5, 5.0)
                vals.append(max(count - 1, 0) ** 1.5)
            means.append(np.mean(vals))
        assert means[1] <= 2.0 * means[0] + 0.5
