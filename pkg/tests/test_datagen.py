import numpy as np
import pytest

from tilesig.datagen import (GenSpec, Xoshiro256, brownian, fbm, fbm_covariance,
                             near_periodic)
from tilesig.errors import FactorizationError, InvalidArgumentError
from tilesig.paths import increments


def test_xoshiro_reference_stream():
    r = Xoshiro256(0)
    assert r.next_u64() == 0x99EC5F36CB75F2B4
    assert r.next_u64() == 0xBF6E1F784956452A


def test_uniform_range():
    r = Xoshiro256(5)
    u = np.array([r.uniform() for _ in range(10000)])
    assert u.min() > 0 and u.max() <= 1
    assert abs(u.mean() - 0.5) < 0.02


def test_normal_moments():
    z = Xoshiro256(9).normals((20000,))
    assert abs(z.mean()) < 0.03 and abs(z.var() - 1) < 0.04


def test_brownian_basics():
    b = brownian(50, 3, 1)
    assert np.all(b.points[0] == 0)
    assert b == brownian(50, 3, 1)
    assert b != brownian(50, 3, 2)


def test_brownian_increment_variance():
    ell = 10 ** 5 + 1
    incs = increments(brownian(ell, 1, 4)).ravel()
    target = 1 / (ell - 1)
    se = target * np.sqrt(2 / incs.size)
    assert abs(incs.var() - target) < 3 * se


def test_fbm_half_is_brownian_covariance():
    t = np.arange(1, 9) / 8
    assert np.allclose(fbm_covariance(9, 0.5), np.minimum.outer(t, t), atol=1e-15)


@pytest.mark.parametrize("H", [0.2, 0.5, 0.8])
def test_fbm_increment_variance(H):
    # one increment per seed keeps the samples independent
    ell = 21
    incs = np.array([increments(fbm(ell, 1, H, s))[5, 0] for s in range(3000)])
    target = (1 / (ell - 1)) ** (2 * H)
    se = target * np.sqrt(2 / incs.size)
    assert abs(np.mean(incs ** 2) - target) < 3 * se


def test_fbm_determinism_and_errors():
    assert fbm(20, 2, 0.3, 7) == fbm(20, 2, 0.3, 7)
    assert np.all(fbm(20, 2, 0.3, 7).points[0] == 0)
    with pytest.raises(InvalidArgumentError):
        fbm(10, 1, 1.0)
    with pytest.raises(InvalidArgumentError):
        fbm(5000, 1, 0.5)


def test_fbm_factorisation_failure(monkeypatch):
    def broken(n, h):
        return -np.eye(n - 1)
    monkeypatch.setattr("tilesig.datagen.fbm_covariance", broken)
    with pytest.raises(FactorizationError, match="jitter"):
        fbm(10, 1, 0.5)


def test_near_periodic_examples():
    flat = near_periodic(30, 2, 0.25, amplitude=0.0, noise=0.0, seed=1)
    assert np.all(flat.points == 0)
    p = near_periodic(41, 2, 0.25, seed=3).points
    assert np.allclose(p[:-10], p[10:], atol=1e-12)
    assert near_periodic(41, 2, 0.3, noise=0.1, seed=3) == near_periodic(41, 2, 0.3, noise=0.1,
                                                                        seed=3)
    with pytest.raises(InvalidArgumentError):
        near_periodic(10, 1, 0.0)


def test_genspec():
    assert GenSpec("fbm", 12, 2, 5, hurst=0.3).generate() == fbm(12, 2, 0.3, 5)
    assert GenSpec("brownian", 12, 2, 5).generate() == brownian(12, 2, 5)
    with pytest.raises(InvalidArgumentError):
        GenSpec("levy", 10)
    with pytest.raises(InvalidArgumentError):
        GenSpec("fbm", 10, hurst=0.0)
