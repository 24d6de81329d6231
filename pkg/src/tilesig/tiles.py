"""Power-series algebra on a single tile in local coordinates ``(u, v)``.

On a tile with increment product ``delta`` the kernel solves
``d2K/du dv = delta * K`` on ``[0, 1]**2`` with data ``K(0, v) = alpha(v)``
on the left edge and ``K(u, 0) = beta(u)`` on the bottom edge, both given
as coefficient vectors of length ``N + 1`` sharing the corner value.  The
truncated solution is ``sum_ij c[i, j] u**i v**j`` with

    c = A * B * W           (entrywise)
    A[i, j] = delta ** min(i, j)
    B[i, j] = alpha[j - i] if j >= i else beta[i - j]
    W[i, j] = |i - j|! / (max(i, j)! min(i, j)!)

Coefficient matrices are indexed ``c[i, j]`` with ``i`` the power of ``u``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from contextlib import contextmanager
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import InconsistentBoundaryError, InvalidArgumentError

MAX_ORDER = 64
CORNER_RTOL = 1e-9


def _check_order(N):
    if not isinstance(N, (int, np.integer)) or N < 0 or N > MAX_ORDER:
        raise InvalidArgumentError(f"order must be an integer in [0, {MAX_ORDER}], got {N!r}")
    return int(N)


_fault = {"active": False}


@contextmanager
def weight_fault():
    """Test hook: inside this block every weight table has ``W[1, 1]`` negated."""
    _fault["active"] = True
    try:
        yield
    finally:
        _fault["active"] = False


def _weights(N):
    W = _exact_weights(N)
    if _fault["active"] and N >= 1:
        W = W.copy()
        W[1, 1] = -W[1, 1]
    return W


@lru_cache(maxsize=None)
def _exact_weights(N):
    W = np.empty((N + 1, N + 1))
    f = [math.factorial(n) for n in range(N + 1)]
    for i in range(N + 1):
        for j in range(N + 1):
            hi, lo = max(i, j), min(i, j)
            W[i, j] = float(Fraction(f[hi - lo], f[hi] * f[lo]))
    W.setflags(write=False)
    return W


def build_W(N: int) -> np.ndarray:
    """Factorial weight table; read-only and cached per order."""
    return _weights(_check_order(N))


def build_A(delta: float, N: int) -> np.ndarray:
    N = _check_order(N)
    pw = np.empty(N + 1)
    _kernels.powers_into(float(delta), pw)
    idx = np.arange(N + 1)
    return pw[np.minimum.outer(idx, idx)]


def unit_series(N: int) -> np.ndarray:
    """The constant-one boundary series ``(1, 0, ..., 0)``."""
    e = np.zeros(_check_order(N) + 1)
    e[0] = 1.0
    return e


def _boundaries(alpha, beta, N):
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    beta = np.ascontiguousarray(beta, dtype=np.float64)
    if alpha.shape != (N + 1,) or beta.shape != (N + 1,):
        raise InvalidArgumentError(
            f"boundary series must have length {N + 1}, got {alpha.shape} and {beta.shape}")
    check_corner(alpha[0], beta[0])
    return alpha, beta


def check_corner(a0, b0, rtol=CORNER_RTOL):
    if not _kernels.corner_ok(float(a0), float(b0), rtol):
        raise InconsistentBoundaryError(
            f"boundary series disagree at the shared corner: {a0!r} vs {b0!r}")


def build_B(alpha, beta, N: int) -> np.ndarray:
    """Toeplitz table with ``alpha`` on and above the diagonal, ``beta`` below."""
    N = _check_order(N)
    alpha, beta = _boundaries(alpha, beta, N)
    idx = np.arange(N + 1)
    offset = idx[None, :] - idx[:, None]
    return np.where(offset >= 0, alpha[np.abs(offset)], beta[np.abs(offset)])


def tile_coeffs(delta: float, alpha, beta, N: int) -> np.ndarray:
    N = _check_order(N)
    alpha, beta = _boundaries(alpha, beta, N)
    out = np.empty((N + 1, N + 1))
    _kernels.tile_matrix_into(float(delta), alpha, beta, _weights(N), np.empty(N + 1), out)
    return out


def eval_series(C, u: float, v: float) -> float:
    """Evaluate ``sum_ij C[i, j] u**i v**j`` by nested Horner recurrence."""
    C = np.asarray(C, dtype=np.float64)
    acc = 0.0
    for row in C[::-1]:
        inner = 0.0
        for c in row[::-1]:
            inner = inner * v + c
        acc = acc * u + inner
    return float(acc)


def top_boundary(C) -> np.ndarray:
    """Restriction of the tile series to ``v = 1``, as a series in ``u``.

    This is the bottom-edge data of the tile above.
    """
    C = np.ascontiguousarray(C, dtype=np.float64)
    out = np.empty(C.shape[0])
    _kernels.row_sums_into(C, out)
    return out


def right_boundary(C) -> np.ndarray:
    """Restriction to ``u = 1``, a series in ``v``: left-edge data of the tile to the right."""
    C = np.ascontiguousarray(C, dtype=np.float64)
    out = np.empty(C.shape[0])
    _kernels.col_sums_into(C, out)
    return out


def step_tile(delta: float, alpha, beta, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(top_boundary(C), right_boundary(C))`` without building ``C``."""
    N = _check_order(N)
    alpha, beta = _boundaries(alpha, beta, N)
    top, right = np.empty(N + 1), np.empty(N + 1)
    _kernels.step_into(float(delta), alpha, beta, _weights(N), np.empty(N + 1), top, right)
    return top, right


def neumann_coeffs_slow(delta: float, alpha, beta, N: int, iters: int) -> np.ndarray:
    """Sum of Neumann iterates ``C_{n+1} = delta * S C_n T`` starting from the boundary data.

    ``S`` integrates in ``u`` (row shift with division by the new power),
    ``T`` likewise in ``v``.  Terms beyond order ``N`` are dropped at each
    step; they never feed back into lower orders.
    """
    N = _check_order(N)
    if iters < 1:
        raise InvalidArgumentError("iters must be >= 1")
    alpha, beta = _boundaries(alpha, beta, N)
    n1 = N + 1
    # S[i, j] = [i-1 == j] / i  with 0/0 := 0; T = S.T
    S = np.zeros((n1, n1))
    for i in range(1, n1):
        S[i, i - 1] = 1.0 / i
    T = S.T.copy()
    # lower-limit corrections vanish at the local origin but are kept for
    # fidelity: (I - H(0)) removes row 0, (I - G(0)) removes column 0
    H0 = np.zeros((n1, n1))
    H0[0, 0] = 1.0
    L = (np.eye(n1) - H0) @ S
    R = T @ (np.eye(n1) - H0)

    C = np.zeros((n1, n1))
    C[0, :] = alpha
    C[:, 0] += beta
    C[0, 0] -= alpha[0]
    total = C.copy()
    for _ in range(iters):
        C = delta * (L @ C @ R)
        total += C
    return total


def monomial_propagation(delta: float, l: int, n: int) -> float:
    """Coefficient of the ``n``-th propagated monomial of degree ``l``."""
    if l < 0 or n < 0:
        raise InvalidArgumentError("l and n must be non-negative")
    return float(delta) ** n * float(
        Fraction(math.factorial(l), math.factorial(l + n) * math.factorial(n)))


def dump_coeffs_csv(C, path):
    np.savetxt(path, np.asarray(C), delimiter=",", fmt="%.17g")
