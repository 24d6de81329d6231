"""Anti-diagonal sweep over all tiles of a pair of series.

Tiles ``(k, l)`` with equal ``k + l`` share no inputs, so each
anti-diagonal may be processed in any order or in parallel.  Only the
boundary series on the current front are stored: one series per column
(the lower edge of the next tile in that column) and one per row (the left
edge of the next tile in that row), i.e. ``O(ell * N)`` numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InconsistentBoundaryError, InvalidArgumentError, NumericOverflowError
from .paths import IncrementTable, as_series, pad_common
from .tiles import CORNER_RTOL, _check_order, _weights, step_tile, unit_series

_LOG_MAX = math.log(np.finfo(np.float64).max)


@dataclass
class KernelResult:
    value: float
    order: int
    tiles_processed: int
    peak_live_series: int
    max_abs_rho: float
    grid: np.ndarray | None = field(default=None, repr=False)


def _prepare(x, y, N):
    N = _check_order(N)
    if N < 1:
        raise InvalidArgumentError("order must be at least 1")
    x, y = as_series(x), as_series(y)
    if x.dim != y.dim:
        raise InvalidArgumentError(f"dimension mismatch: {x.dim} vs {y.dim}")
    x, y = pad_common(x, y)
    if x.length < 2:
        raise InvalidArgumentError("series need at least two points")
    table = IncrementTable(x, y)
    _guard_overflow(table, N)
    return table, N


def _guard_overflow(table, N):
    m = table.max_abs_rho
    if m > 0 and N * math.log(m) > _LOG_MAX - 1:
        with np.errstate(over="ignore"):
            prods = np.abs(table.x_incs @ table.y_incs.T) if table.x_incs.shape[0] <= 4096 else None
        tile = tuple(int(i) for i in np.unravel_index(np.argmax(prods), prods.shape)) \
            if prods is not None else None
        raise NumericOverflowError(
            f"increment product {m:.3g} overflows at order {N}; rescale the inputs", tile=tile)


def _raise_status(status, k, l):
    if status == _kernels.CORNER_MISMATCH:
        raise InconsistentBoundaryError(f"corner mismatch entering tile ({k}, {l})")
    if status == _kernels.NON_FINITE:
        raise NumericOverflowError(
            "non-finite boundary series; rescale the inputs", tile=(int(k), int(l)))


def _sweep(table, N, threads, with_grid):
    nk, nl = table.shape
    n1 = N + 1
    bottom = np.zeros((nk, n1))
    bottom[:, 0] = 1.0
    left = np.zeros((nl, n1))
    left[:, 0] = 1.0
    W = _weights(N)
    grid = np.ones((nk + 1, nl + 1)) if with_grid else np.empty((0, 0))
    threads = max(1, int(threads))

    if threads == 1:
        scratch = np.empty((3, n1))
        status, k, l = _kernels.sweep_all(table.x_incs, table.y_incs, bottom, left, W,
                                          CORNER_RTOL, scratch, grid)
        _raise_status(status, k, l)
        in_flight = 2
    else:
        scratches = [np.empty((3, n1)) for _ in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for d in range(nk + nl - 1):
                k_lo = max(0, d - (nl - 1))
                k_hi = min(d, nk - 1) + 1
                bounds = np.linspace(k_lo, k_hi, threads + 1).astype(int)
                futures = [
                    pool.submit(_kernels.sweep_range, d, int(a), int(b), table.x_incs,
                                table.y_incs, bottom, left, W, CORNER_RTOL, scratches[t], grid)
                    for t, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])) if b > a
                ]
                for f in futures:
                    _raise_status(*f.result())
        in_flight = 2 * threads

    acc = 0.0
    for c in bottom[nk - 1]:
        acc += c
    return float(acc), nk * nl, nk + nl + in_flight, (grid if with_grid else None)


def propagate(x, y, N: int, threads: int = 1) -> KernelResult:
    """Order-``N`` approximation of the signature kernel ``K(1, 1)``.

    Shorter series are padded by repeating their last point.  The result
    is bit-identical for every value of ``threads``.
    """
    table, N = _prepare(x, y, N)
    value, tiles, peak, _ = _sweep(table, N, threads, False)
    return KernelResult(value, N, tiles, peak, table.max_abs_rho)


def propagate_grid(x, y, N: int, threads: int = 1) -> KernelResult:
    """As :func:`propagate`, also returning ``K`` at every pair of knots.

    ``grid[i, j]`` is the kernel at ``(sigma_i, tau_j)``; this costs
    ``O(ell**2)`` memory.
    """
    table, N = _prepare(x, y, N)
    value, tiles, peak, grid = _sweep(table, N, threads, True)
    return KernelResult(value, N, tiles, peak, table.max_abs_rho, grid)


@dataclass
class DiagonalState:
    """Boundary series waiting on anti-diagonal ``d``.

    ``left[n]`` and ``bottom[n]`` feed tile ``(k_lo + n, d - k_lo - n)``.
    """

    d: int
    k_lo: int
    left: list
    bottom: list


def propagate_reference(x, y, N: int, order=None) -> KernelResult:
    """Diagonal-by-diagonal sweep built from :func:`tiles.step_tile` calls.

    Keeps explicit per-diagonal lists of incoming series, as a slow
    cross-check of :func:`propagate`.  ``order`` optionally maps
    ``(d, n_tiles)`` to a permutation of positions on the diagonal.
    """
    table, N = _prepare(x, y, N)
    nk, nl = table.shape
    one = unit_series(N)
    state = DiagonalState(0, 0, [one], [one])
    peak = 2
    for d in range(nk + nl - 1):
        k_lo = state.k_lo
        n_here = len(state.left)
        nxt_lo = max(0, d + 1 - (nl - 1))
        n_next = max(0, min(d + 1, nk - 1) + 1 - nxt_lo)
        nxt_left = [None] * n_next
        nxt_bottom = [None] * n_next
        live = 2 * n_here
        positions = range(n_here) if order is None else order(d, n_here)
        for n in positions:
            k = k_lo + n
            l = d - k
            top, right = step_tile(table.rho(k, l), state.left[n], state.bottom[n], N)
            if k + 1 < nk:
                nxt_left[k + 1 - nxt_lo] = right
                live += 1
            if l + 1 < nl:
                nxt_bottom[k - nxt_lo] = top
                live += 1
            peak = max(peak, live)
            state.left[n] = state.bottom[n] = None
            live -= 2
            if k == nk - 1 and l == nl - 1:
                final = top
        # tiles entering from the domain edges start from the constant-one series
        for n in range(n_next):
            if nxt_left[n] is None:
                nxt_left[n] = one
            if nxt_bottom[n] is None:
                nxt_bottom[n] = one
        state = DiagonalState(d + 1, nxt_lo, nxt_left, nxt_bottom)
    acc = 0.0
    for c in final:
        acc += c
    return KernelResult(float(acc), N, nk * nl, peak, table.max_abs_rho)
