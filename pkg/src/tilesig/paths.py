"""Time series on a uniform grid, their increments and tile coefficients.

A series of length ``ell`` is the piecewise-linear interpolation of its
points on the knots ``0, 1/(ell-1), ..., 1``.  Two series of equal length
split the unit square into ``(ell-1)**2`` tiles; tile ``(k, l)`` (0-based,
``k`` along the first series) carries the constant increment product
``<dx_k, dy_l>``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError, ParseError


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An ``(ell, d)`` array of finite sample values."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgumentError(
                f"expected a non-empty (length, dim) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("time series contains NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def length(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.array_equal(self.points, other.points))

    def __repr__(self):
        return f"TimeSeries(length={self.length}, dim={self.dim})"


def as_series(x) -> TimeSeries:
    return x if isinstance(x, TimeSeries) else TimeSeries(x)


def pad_to_length(ts, L: int) -> TimeSeries:
    """Extend ``ts`` to length ``L`` by repeating its last point."""
    ts = as_series(ts)
    if L < ts.length:
        raise InvalidArgumentError(f"cannot pad length {ts.length} down to {L}")
    if L == ts.length:
        return ts
    tail = np.repeat(ts.points[-1:], L - ts.length, axis=0)
    return TimeSeries(np.vstack([ts.points, tail]))


def pad_common(*series) -> list[TimeSeries]:
    """Pad every series to the longest length among them."""
    series = [as_series(s) for s in series]
    L = max(s.length for s in series)
    return [pad_to_length(s, L) for s in series]


def increments(ts) -> np.ndarray:
    """Return the ``(ell-1, d)`` array of consecutive differences."""
    ts = as_series(ts)
    if ts.length < 2:
        raise InvalidArgumentError("a single point has no increments")
    return np.diff(ts.points, axis=0)


@dataclass(frozen=True)
class TileGrid:
    ell_x: int
    ell_y: int

    @property
    def n_tiles(self) -> int:
        return (self.ell_x - 1) * (self.ell_y - 1)

    def sigma(self, k: int) -> float:
        """Knot ``k`` (0-based) of the first axis."""
        return _knot(k, self.ell_x)

    def tau(self, l: int) -> float:
        return _knot(l, self.ell_y)

    def tile(self, k: int, l: int) -> tuple[tuple[float, float], tuple[float, float]]:
        """Closed tile ``[sigma_k, sigma_{k+1}] x [tau_l, tau_{l+1}]``."""
        if not (0 <= k < self.ell_x - 1 and 0 <= l < self.ell_y - 1):
            raise InvalidArgumentError(f"tile ({k}, {l}) out of range")
        return ((self.sigma(k), self.sigma(k + 1)), (self.tau(l), self.tau(l + 1)))


def _knot(i, ell):
    if not 0 <= i < ell:
        raise InvalidArgumentError(f"knot {i} out of range for length {ell}")
    if ell == 1:
        return 0.0
    return 1.0 if i == ell - 1 else i / (ell - 1)


class IncrementTable:
    """Increments of a pair of series with on-demand tile coefficients.

    The full ``(ell_x-1) x (ell_y-1)`` table of increment products is never
    stored; :meth:`materialize` builds it for diagnostics only.
    """

    def __init__(self, x, y):
        x, y = as_series(x), as_series(y)
        if x.dim != y.dim:
            raise InvalidArgumentError(f"dimension mismatch: {x.dim} vs {y.dim}")
        self.x_incs = np.ascontiguousarray(increments(x))
        self.y_incs = np.ascontiguousarray(increments(y))
        self.max_abs_rho = float(_kernels.max_abs_dot(self.x_incs, self.y_incs))

    @property
    def shape(self):
        return self.x_incs.shape[0], self.y_incs.shape[0]

    def rho(self, k: int, l: int) -> float:
        nk, nl = self.shape
        if not (0 <= k < nk and 0 <= l < nl):
            raise InvalidArgumentError(f"tile ({k}, {l}) out of range for {nk}x{nl} tiles")
        return float(_kernels._dot(self.x_incs[k], self.y_incs[l]))

    def materialize(self) -> np.ndarray:
        """Full table, accumulated in the same order as the sweep."""
        return _kernels.outer_dots(self.x_incs, self.y_incs)


def load_csv(path) -> TimeSeries:
    """Read one time step per row, one dimension per column.

    A first row in which no cell parses as a number is taken as a header.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh)]
    rows = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if rows and not any(_is_number(c) for c in rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0][1])
    data = np.empty((len(rows), width))
    for n, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise ParseError(
                f"{path}: ragged row, expected {width} columns but found {len(cells)}",
                row=lineno)
        for j, cell in enumerate(cells):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{path}: non-numeric cell {cell!r}",
                                 row=lineno, column=j + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: non-finite cell {cell!r}",
                                 row=lineno, column=j + 1)
            data[n, j] = v
    return TimeSeries(data)


def save_csv(ts, path, header=None):
    ts = as_series(ts)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in ts.points:
            w.writerow([repr(float(v)) for v in row])


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True
