import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tilesig.datagen import Xoshiro256
from tilesig.errors import InvalidArgumentError, ResourceError
from tilesig.oracles import (SignatureTensor, bessel_series_kernel, goursat_fd_grid,
                             goursat_fd_solve, picard_global, signature,
                             truncated_signature_kernel, two_tile_closed_form)
from tilesig.validate import random_series
from tilesig.wavefront import propagate

I0_2 = 2.279585302336067
J0_2 = 0.22389077914123567


def test_bessel_series_examples():
    assert bessel_series_kernel(0.0, 10) == 1.0
    assert bessel_series_kernel(1.0, 16) == pytest.approx(I0_2, abs=1e-15)
    assert bessel_series_kernel(-1.0, 16) == pytest.approx(J0_2, abs=1e-15)


def test_two_tile_examples():
    assert two_tile_closed_form(0.7, 0.0, 20) == pytest.approx(bessel_series_kernel(0.7, 20),
                                                               abs=1e-15)
    assert two_tile_closed_form(0.5, 0.5, 20) == pytest.approx(I0_2, abs=1e-14)
    assert two_tile_closed_form(0.0, 0.0, 5) == 1.0


def test_signature_kernel_examples():
    c = np.ones((5, 2))
    assert truncated_signature_kernel(c, c, 6) == 1.0
    x = np.array([[0.0], [1.0]])
    assert truncated_signature_kernel(x, x, 16) == pytest.approx(I0_2, abs=1e-15)


def test_signature_homogeneity():
    rng = np.random.default_rng(0)
    x = np.cumsum(rng.normal(size=(6, 2)), axis=0)
    s1, s2 = signature(x, 5), signature(2.5 * x, 5)
    for m in range(6):
        assert np.allclose(s2.levels[m], 2.5 ** m * s1.levels[m], rtol=1e-12)


def test_signature_of_segment_is_exponential():
    inc = np.array([0.3, -1.2])
    s = signature(np.vstack([np.zeros(2), inc]), 4)
    e = SignatureTensor.segment(inc, 4)
    for a, b in zip(s.levels, e.levels):
        assert np.allclose(a, b, rtol=1e-15)


def test_chen_associativity():
    rng = np.random.default_rng(1)
    segs = [SignatureTensor.segment(rng.normal(size=3), 5) for _ in range(3)]
    left = (segs[0] * segs[1]) * segs[2]
    right = segs[0] * (segs[1] * segs[2])
    for a, b in zip(left.levels, right.levels):
        assert np.allclose(a, b, rtol=0, atol=1e-13)
    pts = np.vstack([np.zeros(3), np.cumsum([s.levels[1] for s in segs], axis=0)])
    for a, b in zip(left.levels, signature(pts, 5).levels):
        assert np.allclose(a, b, rtol=0, atol=1e-13)


def test_signature_levels_decay():
    x = np.cumsum(np.random.default_rng(2).uniform(-0.3, 0.3, (8, 2)), axis=0)
    terms = np.abs(signature(x, 15).level_products(signature(x, 15)))
    assert np.all(terms[6:] < terms[5]) and terms[-1] < 1e-12


def test_signature_budget():
    with pytest.raises(ResourceError):
        signature(np.zeros((3, 4)), 14, budget=1000)
    with pytest.raises(InvalidArgumentError):
        truncated_signature_kernel(np.zeros((3, 2)), np.zeros((3, 3)), 3)


def test_fd_zero_rho_is_one():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    y = np.array([[0.0, 0.0], [0.0, 1.0], [0.0, 3.0]])
    assert np.all(goursat_fd_grid(x, y, 8) == 1.0)


def test_fd_second_order_convergence():
    x = np.array([[0.0], [1.0]])
    errs = [abs(goursat_fd_solve(x, x, R) - I0_2) for R in (16, 32, 64)]
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(slopes - 2) < 0.1)


def test_fd_self_grid_symmetric():
    x = np.cumsum(np.random.default_rng(3).uniform(-0.5, 0.5, (5, 2)), axis=0)
    g = goursat_fd_grid(x, x, 6)
    assert np.allclose(g, g.T, rtol=1e-14, atol=0)


def test_picard_examples():
    z = np.zeros((3, 2))
    assert picard_global(z, z, 4, P=1) == 1.0
    x = np.array([[0.0], [1.0], [1.5]])
    v, seen = picard_global(x, x, 8, history=True)
    assert np.all(np.diff(seen) >= 0)
    assert v == pytest.approx(goursat_fd_solve(x, x, 8), rel=5e-3)
    assert picard_global(x, x, 32) == pytest.approx(goursat_fd_solve(x, x, 32), rel=5e-4)


def _triangle_errors(cases, seed):
    rng = Xoshiro256(seed)
    sig, fd_scaled, fd_rel = [], [], []
    for _ in range(cases):
        lx = 2 + int(rng.uniform() * 9)
        ly = 2 + int(rng.uniform() * 9)
        x = random_series(rng, lx, 2, 0.8)
        y = random_series(rng, ly, 2, 0.8)
        v = propagate(x, y, 24).value
        s = truncated_signature_kernel(x, y, 20)
        f = goursat_fd_solve(x, y, 64)
        sig.append(abs(v - s) / abs(s))
        fd_scaled.append(abs(f - v) / max(1.0, abs(v)))
        fd_rel.append(abs(f - v) / abs(v))
    return np.array(sig), np.array(fd_scaled), np.array(fd_rel)


def test_oracle_triangle():
    sig, fd_scaled, _ = _triangle_errors(40, 5)
    assert sig.max() <= 1e-8
    assert fd_scaled.max() <= 1e-4


@pytest.mark.xfail(strict=True, reason="second-order FD at R=64 is not 1e-5 relative "
                   "where the kernel is close to zero")
def test_oracle_triangle_fd_relative_1e5():
    _, _, fd_rel = _triangle_errors(100, 5)
    assert fd_rel.max() <= 1e-5


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 10 ** 6))
def test_tile_sweep_matches_signature(lx, ly, seed):
    rng = Xoshiro256(seed)
    x = random_series(rng, lx, 2, 0.8)
    y = random_series(rng, ly, 2, 0.8)
    assert propagate(x, y, 24).value == pytest.approx(
        truncated_signature_kernel(x, y, 20), rel=1e-10)
