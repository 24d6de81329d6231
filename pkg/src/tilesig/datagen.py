"""Deterministic synthetic series.

Randomness comes from an in-repo xoshiro256** generator seeded through
splitmix64, so a seed reproduces the same numbers on any platform.
Uniforms are ``((z >> 11) + 1) * 2**-53`` in ``(0, 1]``.  Normals use the
Box-Muller pair ``r cos(2 pi u2), r sin(2 pi u2)`` with
``r = sqrt(-2 log u1)``, emitted in that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FactorizationError, InvalidArgumentError
from .paths import TimeSeries

_MASK = (1 << 64) - 1
DEFAULT_SEED = 20240101
MAX_FBM_LENGTH = 4096


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256:
    """xoshiro256** 1.0 with splitmix64 seeding."""

    def __init__(self, seed: int):
        z = int(seed) & _MASK
        state = []
        for _ in range(4):
            z = (z + 0x9E3779B97F4A7C15) & _MASK
            w = z
            w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
            w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & _MASK
            state.append(w ^ (w >> 31))
        self.s = state
        self._spare = None

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        return ((self.next_u64() >> 11) + 1) * (1.0 / (1 << 53))

    def normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        r = math.sqrt(-2.0 * math.log(self.uniform()))
        theta = 2.0 * math.pi * self.uniform()
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def normals(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        return np.array([self.normal() for _ in range(n)]).reshape(shape)


@dataclass(frozen=True)
class GenSpec:
    kind: str
    length: int
    dim: int = 2
    seed: int = DEFAULT_SEED
    hurst: float = 0.5
    period: float = 0.25
    amplitude: float = 1.0
    noise: float = 0.0

    def __post_init__(self):
        if self.kind not in ("brownian", "fbm", "near_periodic"):
            raise InvalidArgumentError(f"unknown generator {self.kind!r}")
        if self.length < 2 or self.dim < 1:
            raise InvalidArgumentError("need length >= 2 and dim >= 1")
        if not 0 < self.hurst < 1:
            raise InvalidArgumentError("Hurst index must lie in (0, 1)")

    def generate(self) -> TimeSeries:
        if self.kind == "brownian":
            return brownian(self.length, self.dim, self.seed)
        if self.kind == "fbm":
            return fbm(self.length, self.dim, self.hurst, self.seed)
        return near_periodic(self.length, self.dim, self.period, self.amplitude,
                             self.noise, self.seed)


def brownian(length: int, dim: int, seed: int = DEFAULT_SEED) -> TimeSeries:
    """Brownian path on the uniform grid of ``[0, 1]`` starting at the origin."""
    if length < 2:
        raise InvalidArgumentError("length must be >= 2")
    steps = Xoshiro256(seed).normals((length - 1, dim)) * math.sqrt(1.0 / (length - 1))
    return TimeSeries(np.vstack([np.zeros((1, dim)), np.cumsum(steps, axis=0)]))


def fbm_covariance(length: int, hurst: float) -> np.ndarray:
    """Covariance of fBm at the grid points ``k/(length-1)``, ``k >= 1``."""
    t = np.arange(1, length) / (length - 1)
    h2 = 2.0 * hurst
    return 0.5 * (t[:, None] ** h2 + t[None, :] ** h2 - np.abs(t[:, None] - t[None, :]) ** h2)


def fbm(length: int, dim: int, hurst: float, seed: int = DEFAULT_SEED) -> TimeSeries:
    """Exact fractional Brownian motion sample via Cholesky factorisation."""
    if not 0 < hurst < 1:
        raise InvalidArgumentError("Hurst index must lie in (0, 1)")
    if not 2 <= length <= MAX_FBM_LENGTH + 1:
        raise InvalidArgumentError(f"fbm length must lie in [2, {MAX_FBM_LENGTH + 1}]")
    try:
        L = np.linalg.cholesky(fbm_covariance(length, hurst))
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            f"fBm covariance factorisation failed for H={hurst}; "
            "add a small diagonal jitter or use a shorter series") from exc
    z = Xoshiro256(seed).normals((length - 1, dim))
    return TimeSeries(np.vstack([np.zeros((1, dim)), L @ z]))


def near_periodic(length: int, dim: int, period: float, amplitude: float = 1.0,
                  noise: float = 0.0, seed: int = DEFAULT_SEED) -> TimeSeries:
    """Sinusoid of the given period (in units of the ``[0, 1]`` time axis).

    Each coordinate gets a uniform random phase; Gaussian noise with
    standard deviation ``noise`` is added pointwise.
    """
    if period <= 0:
        raise InvalidArgumentError("period must be positive")
    rng = Xoshiro256(seed)
    phases = np.array([2.0 * math.pi * rng.uniform() for _ in range(dim)])
    t = np.arange(length)[:, None] / (length - 1)
    x = amplitude * np.sin(2.0 * math.pi * t / period + phases[None, :])
    if noise:
        x = x + noise * rng.normals((length, dim))
    return TimeSeries(x)
