"""Slow, independent reference computations of the signature kernel.

None of these share code with the tile sweep: closed forms for one and two
tiles, the truncated signature kernel from explicit tensors, a
finite-difference Goursat solver and global Picard iteration.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .errors import InvalidArgumentError, ResourceError
from .paths import as_series, increments, pad_common

DEFAULT_BUDGET = 2 ** 26  # float64 entries per signature (512 MiB)


def bessel_series_kernel(rho: float, N: int) -> float:
    """Partial sum ``sum_{i<=N} rho**i / (i!)**2``."""
    if N > 64:
        raise InvalidArgumentError("N must be <= 64")
    total, term = 0.0, 1.0
    for i in range(N + 1):
        if i:
            term *= rho / (i * i)
        total += term
    return total


def two_tile_closed_form(d11: float, d12: float, N: int) -> float:
    """Kernel at the far corner of two stacked tiles with products ``d11``, ``d12``.

    Sums ``d11**i d12**j / ((i+j)! i! j!)`` over ``i + j <= 2N``.
    """
    if N > 64:
        raise InvalidArgumentError("N must be <= 64")
    total = 0.0
    for i in range(2 * N + 1):
        for j in range(2 * N + 1 - i):
            total += d11 ** i * d12 ** j / (
                math.factorial(i + j) * math.factorial(i) * math.factorial(j))
    return total


# --- truncated signatures ------------------------------------------------

class SignatureTensor:
    """Levels ``0..M`` of a signature; level ``m`` is a flat array of ``d**m`` reals."""

    def __init__(self, levels):
        self.levels = [np.asarray(lv, dtype=np.float64).ravel() for lv in levels]
        self.dim = self.levels[1].size if len(self.levels) > 1 else 1
        if self.levels[0].shape != (1,) or self.levels[0][0] != 1.0:
            raise InvalidArgumentError("level 0 must be the scalar 1")
        for m, lv in enumerate(self.levels):
            if lv.size != self.dim ** m:
                raise InvalidArgumentError(f"level {m} has {lv.size} entries, expected {self.dim ** m}")

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @classmethod
    def identity(cls, d, M):
        return cls([np.ones(1)] + [np.zeros(d ** m) for m in range(1, M + 1)])

    @classmethod
    def segment(cls, inc, M):
        """Tensor exponential of one increment: level ``m`` is ``inc**(x m) / m!``."""
        inc = np.asarray(inc, dtype=np.float64).ravel()
        levels = [np.ones(1)]
        for m in range(1, M + 1):
            levels.append(np.multiply.outer(levels[-1], inc).ravel() / m)
        return cls(levels)

    def __mul__(self, other):
        """Chen product: level ``m`` is ``sum_{p+q=m} self_p (x) other_q``."""
        if self.dim != other.dim or self.depth != other.depth:
            raise InvalidArgumentError("signatures differ in dimension or depth")
        out = []
        for m in range(self.depth + 1):
            acc = np.zeros(self.dim ** m)
            for p in range(m + 1):
                acc += np.multiply.outer(self.levels[p], other.levels[m - p]).ravel()
            out.append(acc)
        return SignatureTensor(out)

    def level_products(self, other) -> np.ndarray:
        """``<S_m, T_m>`` for every level."""
        return np.array([float(a @ b) for a, b in zip(self.levels, other.levels)])


@numba.njit(cache=True)
def _append_segment(levels_flat, offsets, d, M, inc, buf_a, buf_b):
    # In place S <- S (x) exp(inc), top level first so lower levels are
    # still the old ones.  Horner form for level m:
    #   t = S_0 inc / m;  t = (t + S_k) inc / (m - k), k = 1..m-1;  S_m += t
    for m in range(M, 0, -1):
        t = buf_a
        for b in range(d):
            t[b] = inc[b] / m
        n = d
        for k in range(1, m):
            base = offsets[k]
            out = buf_b if t is buf_a else buf_a
            scale = 1.0 / (m - k)
            for a in range(n):
                v = (t[a] + levels_flat[base + a]) * scale
                for b in range(d):
                    out[a * d + b] = v * inc[b]
            t = out
            n *= d
        base = offsets[m]
        for a in range(n):
            levels_flat[base + a] += t[a]


def signature(ts, M: int, budget: int = DEFAULT_BUDGET) -> SignatureTensor:
    """Signature of the piecewise-linear interpolation of ``ts`` up to level ``M``."""
    ts = as_series(ts)
    d = ts.dim
    sizes = [d ** m for m in range(M + 1)]
    total = sum(sizes)
    if total + 2 * sizes[-1] > budget:
        raise ResourceError(
            f"signature to level {M} in dimension {d} needs {total} entries; budget is {budget}")
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    flat = np.zeros(total)
    flat[0] = 1.0
    if ts.length >= 2 and M >= 1:
        buf_a = np.empty(sizes[-1])
        buf_b = np.empty(sizes[-1])
        for inc in increments(ts):
            _append_segment(flat, offsets, d, M, np.ascontiguousarray(inc), buf_a, buf_b)
    return SignatureTensor([flat[offsets[m]:offsets[m + 1]] for m in range(M + 1)])


def truncated_signature_kernel(x, y, M: int, budget: int = DEFAULT_BUDGET) -> float:
    """``sum_{m<=M} <S_m(x), S_m(y)>``."""
    x, y = as_series(x), as_series(y)
    if x.dim != y.dim:
        raise InvalidArgumentError(f"dimension mismatch: {x.dim} vs {y.dim}")
    sx = signature(x, M, budget)
    if y is x or (y.points.shape == x.points.shape and np.array_equal(x.points, y.points)):
        return float(sum(np.dot(lv, lv) for lv in sx.levels))
    sy = signature(y, M, budget)
    return float(sx.level_products(sy).sum())


# --- lattice solvers ------------------------------------------------------

def _cell_products(x, y, R):
    x, y = pad_common(as_series(x), as_series(y))
    if x.dim != y.dim:
        raise InvalidArgumentError(f"dimension mismatch: {x.dim} vs {y.dim}")
    if R < 1:
        raise InvalidArgumentError("refinement must be >= 1")
    # each tile is split into R x R cells; c = delta / R**2 is the PDE
    # coefficient times the cell area
    prods = increments(x) @ increments(y).T
    return np.repeat(np.repeat(prods, R, axis=0), R, axis=1) / (R * R)


@numba.njit(cache=True)
def _fd_sweep(c):
    n, m = c.shape
    K = np.ones((n + 1, m + 1))
    for i in range(n):
        for j in range(m):
            a = c[i, j]
            K[i + 1, j + 1] = (K[i + 1, j] + K[i, j + 1]) * (1.0 + a / 2 + a * a / 12) \
                - K[i, j] * (1.0 - a * a / 12)
    return K


def goursat_fd_grid(x, y, R: int) -> np.ndarray:
    """Finite-difference solution on the refined lattice.

    Cell update ``K11 = (K10 + K01)(1 + c/2 + c**2/12) - K00 (1 - c**2/12)``,
    which matches the exact cell solution through ``c**2`` when the corner
    data are all one.  Convergence in the refinement is second order.
    """
    return _fd_sweep(_cell_products(x, y, R))


def goursat_fd_solve(x, y, R: int) -> float:
    return float(goursat_fd_grid(x, y, R)[-1, -1])


def picard_global(x, y, R: int, P: int = 200, tol: float = 1e-13, history=False):
    """Fixed-point iteration ``K <- 1 + iint rho K`` on the refined lattice.

    Cell integrals use the four-corner trapezoidal rule.  Returns the value
    at ``(1, 1)``, or ``(value, iterates)`` with ``history=True`` where
    ``iterates`` lists the corner value after each sweep.
    """
    c = _cell_products(x, y, R)
    K = np.ones((c.shape[0] + 1, c.shape[1] + 1))
    seen = []
    for _ in range(P):
        cell = 0.25 * c * (K[:-1, :-1] + K[1:, :-1] + K[:-1, 1:] + K[1:, 1:])
        new = np.ones_like(K)
        new[1:, 1:] += np.cumsum(np.cumsum(cell, axis=0), axis=1)
        diff = np.max(np.abs(new - K))
        K = new
        seen.append(float(K[-1, -1]))
        if diff < tol:
            break
    value = float(K[-1, -1])
    return (value, seen) if history else value
