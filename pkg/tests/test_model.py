import numpy as np
import pytest

from schlab import (
    EnergyContext,
    ModelParams,
    NoiseSpec,
    TridiagModel,
    arcsine_rho,
    energy_context,
    rng_stream,
    sample_model,
    t_step,
)

THIRD_ABS_MOMENTS = {
    "rademacher": 1.0,
    "gaussian": 2.0 * np.sqrt(2.0 / np.pi),
    "uniform": 9.0 / (4.0 * np.sqrt(3.0)),
}

FOURTH_MOMENTS = {"rademacher": 1.0, "gaussian": 3.0, "uniform": 9.0 / 5.0}


def test_rho_values():
    assert arcsine_rho(0.0) == 1.0
    assert arcsine_rho(np.sqrt(2.0)) == pytest.approx(np.sqrt(2.0), abs=1e-12)


@pytest.mark.parametrize("bad", [2.0, -2.0, 2.5, np.inf])
def test_rho_domain(bad):
    with pytest.raises(ValueError):
        arcsine_rho(bad)


def test_rho_even():
    es = np.linspace(-1.999, 1.999, 101)
    for e in es:
        assert arcsine_rho(e) == arcsine_rho(-e)
        assert arcsine_rho(e) >= 1.0


def test_arcsine_normalization():
    # substitute s = 2 sin(u) to avoid the endpoint singularities
    nodes, weights = np.polynomial.legendre.leggauss(200)
    u = 0.5 * np.pi * nodes
    w = 0.5 * np.pi * weights
    integrand = np.array([arcsine_rho(2 * np.sin(x)) for x in u])
    total = np.sum(w * integrand * 2 * np.cos(u)) / (2 * np.pi)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("family", ["rademacher", "gaussian", "uniform"])
def test_noise_moments(family):
    rng = rng_stream(12, 0)
    x = NoiseSpec(family).sample(rng, 200_000)
    m = x.size
    se_mean = 1.0 / np.sqrt(m)
    assert abs(x.mean()) <= 3 * se_mean
    # second moment about the known mean 0
    se_var = np.sqrt(max(FOURTH_MOMENTS[family] - 1.0, 0.0) / m)
    assert abs(np.mean(x * x) - 1.0) <= 3 * se_var + 1e-12
    a3 = np.abs(x) ** 3
    se_a3 = a3.std() / np.sqrt(m)
    assert abs(a3.mean() - THIRD_ABS_MOMENTS[family]) <= 3 * se_a3 + 1e-12


def test_noise_family_validation():
    with pytest.raises(ValueError):
        NoiseSpec("cauchy")


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(n=0, sigma=1.0)
    with pytest.raises(ValueError):
        ModelParams(n=5, sigma=-1.0)
    with pytest.raises(ValueError):
        ModelParams(n=5, sigma=1.0, seed=-3)


def test_sample_model_sigma_zero():
    model = sample_model(ModelParams(n=50, sigma=0.0, seed=9), NoiseSpec("gaussian"))
    assert np.all(model.diag == 0.0)


def test_sample_model_deterministic():
    params = ModelParams(n=100, sigma=1.5, seed=42)
    noise = NoiseSpec("uniform")
    a = sample_model(params, noise)
    b = sample_model(params, noise)
    assert np.array_equal(a.diag, b.diag)
    c = sample_model(ModelParams(n=100, sigma=1.5, seed=43), noise)
    assert not np.array_equal(a.diag, c.diag)


def test_sample_model_variance_scaling():
    params = ModelParams(n=100_000, sigma=1.0, seed=7)
    model = sample_model(params, NoiseSpec("gaussian"))
    scaled = model.diag * np.sqrt(params.n)
    se_var = np.sqrt(2.0 / params.n)
    assert abs(scaled.var() - 1.0) <= 3 * se_var


@pytest.mark.parametrize("energy", [-1.9, -1.0, -0.3, 0.0, 0.5, 1.2, 1.99])
def test_energy_context_invariants(energy):
    ctx = energy_context(energy, sigma=1.3)
    assert abs(abs(ctx.z) - 1.0) <= 1e-14
    assert ctx.rho == pytest.approx(arcsine_rho(energy), abs=1e-15)
    assert ctx.tau == pytest.approx((1.3 * ctx.rho) ** 2, rel=1e-14)
    recon = ctx.zmat @ ctx.dmat @ ctx.zmat_inv
    assert np.max(np.abs(recon - t_step(energy))) <= 1e-12
    start = ctx.zmat @ np.array([1.0, 1.0])
    assert np.max(np.abs(start - np.array([1.0, 0.0]))) <= 1e-12


def test_energy_context_examples():
    ctx = energy_context(0.0, 1.0)
    assert ctx.z == pytest.approx(1j)
    assert ctx.rho == 1.0 and ctx.tau == 1.0
    ctx = energy_context(1.0, 1.0)
    assert ctx.z == pytest.approx(0.5 + 0.8660254j, abs=1e-7)
    assert ctx.tau == pytest.approx(4.0 / 3.0, rel=1e-12)
    with pytest.raises(ValueError):
        energy_context(2.0, 1.0)


def test_tridiag_model_validation():
    with pytest.raises(ValueError):
        TridiagModel(diag=np.array([1.0, np.inf]))
    model = TridiagModel(diag=np.array([0.5, -0.25]))
    assert model.n == 2
    assert model.scale == 2.5
    dense = model.dense()
    assert np.array_equal(dense, dense.T)
    assert dense[0, 1] == 1.0
