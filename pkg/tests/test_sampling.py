import numpy as np
import pytest
from scipy import stats

from qspeed.linalg import Hamiltonian, validate_density
from qspeed.sampling import (
    SamplerConfig,
    iter_blocks,
    sample_block,
    sample_density,
    sample_haar_unitary,
    sample_simplex,
    sample_states,
    stream,
)
from qspeed.speed import batch_speeds


def test_simplex_basic():
    rng = np.random.default_rng(0)
    assert sample_simplex(1, rng).tolist() == [1.0]
    p = sample_simplex(5, rng)
    assert np.all(p >= 0) and abs(p.sum() - 1) <= 1e-14


def test_simplex_moments():
    rng = np.random.default_rng(1)
    d, n = 4, 100_000
    P = np.array([sample_simplex(d, rng) for _ in range(n)])
    # Dirichlet(1,...,1): mean 1/d, var (d-1)/(d^2 (d+1))
    sd = np.sqrt((d - 1) / (d ** 2 * (d + 1)) / n)
    assert np.all(np.abs(P.mean(0) - 1 / d) <= 3 * sd)
    s2 = (P ** 2).sum(1)
    assert abs(s2.mean() - 2 / (d + 1)) <= 3 * s2.std() / np.sqrt(n)


def test_haar_unitarity():
    rng = np.random.default_rng(2)
    U = sample_haar_unitary(4, rng, size=1000)
    err = np.abs(U.conj().transpose(0, 2, 1) @ U - np.eye(4)).max()
    assert err <= 1e-12
    assert sample_haar_unitary(3, rng).shape == (3, 3)


def test_haar_moment():
    rng = np.random.default_rng(3)
    d, n = 4, 20_000
    U = sample_haar_unitary(d, rng, size=n)
    x = np.abs(U[:, 0, 0]) ** 2
    assert abs(x.mean() - 1 / d) <= 3 * x.std() / np.sqrt(n)


def test_haar_eigenphases_flat():
    rng = np.random.default_rng(4)
    U = sample_haar_unitary(4, rng, size=10_000)
    ang = np.angle(np.linalg.eigvals(U)).ravel()
    counts, _ = np.histogram(ang, bins=20, range=(-np.pi, np.pi))
    assert stats.chisquare(counts).pvalue > 0.01


def test_naive_qr_is_not_haar():
    # without the phase fix the eigenphases are visibly non-uniform
    rng = np.random.default_rng(4)
    Z = rng.standard_normal((10_000, 4, 4)) + 1j * rng.standard_normal((10_000, 4, 4))
    Q, _ = np.linalg.qr(Z)
    ang = np.angle(np.linalg.eigvals(Q)).ravel()
    counts, _ = np.histogram(ang, bins=20, range=(-np.pi, np.pi))
    assert stats.chisquare(counts).pvalue < 1e-6


def test_sample_density_valid():
    rng = np.random.default_rng(5)
    for d in (1, 2, 4, 6):
        for _ in range(50):
            rho = sample_density(d, rng)
            validate_density(rho)
            assert 1 / d - 1e-12 <= rho.purity <= 1 + 1e-12


def test_stream_determinism_and_layout():
    cfg = SamplerConfig(4, seed=99, n_diag=6, n_unitary=5)
    a = sample_states(cfg)
    b = sample_states(cfg, threads=3)
    assert a.shape == (30, 4, 4)
    assert a.tobytes() == b.tobytes()
    blk = sample_block(cfg, 2)
    assert blk.states.tobytes() == a[10:15].tobytes()
    rng = stream(99, 2)
    p = sample_simplex(4, rng)
    np.testing.assert_array_equal(p, blk.spectrum)
    assert [b.index for b in iter_blocks(cfg)] == list(range(6))


def test_different_seeds_differ():
    a = sample_states(SamplerConfig(3, 1, 2, 2))
    b = sample_states(SamplerConfig(3, 2, 2, 2))
    assert not np.array_equal(a, b)


def test_sqrt_states():
    blk = sample_block(SamplerConfig(4, 7, 1, 10), 0)
    R = blk.sqrt_states()
    np.testing.assert_allclose(R @ R, blk.states, atol=1e-14)


def test_for_samples_layout():
    cfg = SamplerConfig.for_samples(4, 250, seed=1)
    assert cfg.n_unitary == 100 and cfg.n_diag == 3
    assert sample_states(cfg, limit=250).shape[0] == 250
    assert SamplerConfig.for_samples(4, 1).total == 1


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(4, n_diag=0)
    with pytest.raises(ValueError):
        SamplerConfig(4, seed=-1)
    with pytest.raises(ValueError):
        SamplerConfig.for_samples(4, 0)


def test_speeds_invariant_under_energy_shift():
    S = sample_states(SamplerConfig(4, 11, 20, 10))
    E = np.array([0, 0.3, 1.1, 1.4])
    v1, w1 = batch_speeds(Hamiltonian(E), S)
    v2, w2 = batch_speeds(Hamiltonian(E + 3.5), S)
    np.testing.assert_allclose(v1, v2, rtol=1e-12)
    np.testing.assert_allclose(w1, w2, rtol=1e-12)
