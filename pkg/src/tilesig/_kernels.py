"""Compiled inner loops shared by the tile algebra and the wavefront sweep.

Every public tile operation funnels through these functions so that the
composed per-tile path and the fused sweep perform the same floating-point
operations in the same order.
"""

import numba
import numpy as np

_jit = numba.njit(cache=True, nogil=True)

OK = 0
CORNER_MISMATCH = 1
NON_FINITE = 2


@_jit
def powers_into(delta, out):
    # 0**0 == 1, so a zero increment gives (1, 0, 0, ...)
    out[0] = 1.0
    for m in range(1, out.shape[0]):
        out[m] = out[m - 1] * delta


@_jit
def tile_matrix_into(delta, alpha, beta, W, pw, out):
    """out[i, j] = delta**min(i, j) * B[i, j] * W[i, j]."""
    n1 = W.shape[0]
    powers_into(delta, pw)
    for i in range(n1):
        for j in range(n1):
            if j >= i:
                b = alpha[j - i]
                p = pw[i]
            else:
                b = beta[i - j]
                p = pw[j]
            out[i, j] = (p * b) * W[i, j]


@_jit
def row_sums_into(C, out):
    n1 = C.shape[0]
    for i in range(n1):
        acc = 0.0
        for j in range(n1):
            acc += C[i, j]
        out[i] = acc


@_jit
def col_sums_into(C, out):
    n1 = C.shape[0]
    for j in range(n1):
        out[j] = 0.0
    for i in range(n1):
        for j in range(n1):
            out[j] += C[i, j]


@_jit
def corner_ok(a0, b0, rtol):
    scale = max(1.0, abs(a0), abs(b0))
    return abs(a0 - b0) <= rtol * scale


@_jit
def step_into(delta, alpha, beta, W, pw, top, right):
    """Fused tile step: row sums into ``top``, column sums into ``right``.

    Accumulation order matches ``tile_matrix_into`` followed by
    ``row_sums_into`` / ``col_sums_into``, so results are bit-identical.
    """
    n1 = W.shape[0]
    powers_into(delta, pw)
    for j in range(n1):
        right[j] = 0.0
    for i in range(n1):
        acc = 0.0
        for j in range(n1):
            if j >= i:
                c = (pw[i] * alpha[j - i]) * W[i, j]
            else:
                c = (pw[j] * beta[i - j]) * W[i, j]
            acc += c
            right[j] += c
        top[i] = acc


@_jit
def _dot(a, b):
    acc = 0.0
    for m in range(a.shape[0]):
        acc += a[m] * b[m]
    return acc


@_jit
def outer_dots(a, b):
    out = np.empty((a.shape[0], b.shape[0]))
    for k in range(a.shape[0]):
        for l in range(b.shape[0]):
            out[k, l] = _dot(a[k], b[l])
    return out


@_jit
def max_abs_dot(a, b):
    best = 0.0
    for k in range(a.shape[0]):
        for l in range(b.shape[0]):
            v = abs(_dot(a[k], b[l]))
            if v > best or v != v:
                best = v
    return best


@_jit
def sweep_range(d, k_lo, k_hi, x_incs, y_incs, bottom, left, W, rtol, scratch, grid):
    """Process tiles ``(k, d - k)`` for ``k`` in ``[k_lo, k_hi)``.

    ``bottom[k]`` holds the series along the lower edge of the next
    unprocessed tile in column ``k`` (a series in the first variable);
    ``left[l]`` the series along the left edge of the next tile in row
    ``l``.  Tiles on one anti-diagonal touch disjoint slots.

    ``scratch`` is a (3, N+1) work buffer owned by the caller.  Returns
    ``(status, k, l)``; on a failure the slots of the failing tile are left
    untouched.
    """
    pw = scratch[0]
    top = scratch[1]
    right = scratch[2]
    n1 = W.shape[0]
    for k in range(k_lo, k_hi):
        l = d - k
        alpha = left[l]
        beta = bottom[k]
        if not corner_ok(alpha[0], beta[0], rtol):
            return CORNER_MISMATCH, k, l
        delta = _dot(x_incs[k], y_incs[l])
        step_into(delta, alpha, beta, W, pw, top, right)
        for m in range(n1):
            if not np.isfinite(top[m]) or not np.isfinite(right[m]):
                return NON_FINITE, k, l
        for m in range(n1):
            bottom[k, m] = top[m]
            left[l, m] = right[m]
        if grid.shape[0] > 0:
            acc = 0.0
            for m in range(n1):
                acc += top[m]
            grid[k + 1, l + 1] = acc
    return OK, -1, -1


@_jit
def sweep_all(x_incs, y_incs, bottom, left, W, rtol, scratch, grid):
    """Single-threaded sweep over every anti-diagonal."""
    nk = x_incs.shape[0]
    nl = y_incs.shape[0]
    for d in range(nk + nl - 1):
        k_lo = max(0, d - (nl - 1))
        k_hi = min(d, nk - 1) + 1
        status, k, l = sweep_range(d, k_lo, k_hi, x_incs, y_incs, bottom, left,
                                   W, rtol, scratch, grid)
        if status != OK:
            return status, k, l
    return OK, -1, -1
