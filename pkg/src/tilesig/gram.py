"""Gram matrices of signature kernels over a family of series."""

from __future__ import annotations

import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, NumericOverflowError
from .paths import IncrementTable, as_series, pad_common
from .truncation import TruncationPolicy, gram_error_bound, max_abs_increment_product
from .wavefront import propagate

SCHEMA_VERSION = 1
SYMMETRY_TOL = 1e-12
PSD_RTOL = 1e-8


@dataclass
class GramResult:
    values: np.ndarray
    orders: np.ndarray
    bound: float
    policy: TruncationPolicy
    wall_time: float
    peak_live_series: int
    converged: bool = True
    errors: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        """Smallest order used by any entry (the one governing the bound)."""
        return int(self.orders.min())

    def check(self) -> list[str]:
        """Names of violated structural properties; empty when all hold."""
        G = self.values
        bad = []
        if not np.allclose(G, G.T, rtol=0, atol=SYMMETRY_TOL * max(1.0, np.abs(G).max())):
            bad.append("symmetric")
        if np.any(np.diag(G) < 1 - 1e-12):
            bad.append("diagonal>=1")
        eig = np.linalg.eigvalsh((G + G.T) / 2)
        if eig.min() < -PSD_RTOL * np.trace(G):
            bad.append("psd")
        return bad

    def metadata(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "m": int(self.values.shape[0]),
            "policy": self.policy.to_dict(),
            "N": self.order,
            "orders": self.orders.tolist(),
            "converged": self.converged,
            "bound": self.bound,
            "wall_time_s": self.wall_time,
            "peak_live_series": self.peak_live_series,
        }

    def write_csv(self, path):
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")

    def write_json(self, path, include_values=True):
        meta = self.metadata()
        if include_values:
            meta["values"] = self.values.tolist()
        Path(path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def gram_matrix(family, policy: TruncationPolicy | None = None,
                threads: int = 1) -> GramResult:
    """Kernel values ``K(x_i, x_j)(1, 1)`` for every pair in ``family``.

    Only the upper triangle is computed; the lower triangle is mirrored.
    Each entry is independent, so ``threads`` workers give bit-identical
    results.  Entries that overflow are all collected and then reported
    together in one :class:`NumericOverflowError`.
    """
    policy = policy or TruncationPolicy.fixed()
    family = [as_series(s) for s in family]
    if not family:
        raise InvalidArgumentError("family is empty")
    dims = {s.dim for s in family}
    if len(dims) > 1:
        raise InvalidArgumentError(f"mixed dimensions in family: {sorted(dims)}")
    family = pad_common(*family)
    m = len(family)
    pairs = [(i, j) for i in range(m) for j in range(i, m)]

    def entry(pair):
        i, j = pair
        rho = IncrementTable(family[i], family[j]).max_abs_rho
        N, ok = policy.resolve(rho)
        try:
            r = propagate(family[i], family[j], N)
        except NumericOverflowError as exc:
            return pair, N, ok, None, exc
        return pair, N, ok, r, None

    t0 = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(entry, pairs))
    else:
        results = [entry(p) for p in pairs]
    wall = time.perf_counter() - t0

    G = np.full((m, m), np.nan)
    orders = np.zeros((m, m), dtype=int)
    errors, peak, converged = {}, 0, True
    for (i, j), N, ok, r, exc in results:
        orders[i, j] = orders[j, i] = N
        converged &= ok
        if exc is not None:
            errors[(i, j)] = str(exc)
            continue
        G[i, j] = G[j, i] = r.value
        peak = max(peak, r.peak_live_series)
    if errors:
        listing = "; ".join(f"entry {k}: {v}" for k, v in sorted(errors.items()))
        raise NumericOverflowError(f"{len(errors)} Gram entries overflowed: {listing}")

    bound = gram_error_bound(m=m, ell=family[0].length,
                             max_x=max_abs_increment_product(family), N=int(orders.min()))
    return GramResult(G, orders, bound, policy, wall, peak, converged)


def mape(G, G_ref) -> float:
    """Mean of ``|G - G_ref| / |G_ref|`` over entries with nonzero reference."""
    G = np.asarray(G, dtype=np.float64)
    G_ref = np.asarray(G_ref, dtype=np.float64)
    if G.shape != G_ref.shape:
        raise InvalidArgumentError(f"shape mismatch: {G.shape} vs {G_ref.shape}")
    keep = G_ref != 0
    dropped = int(G_ref.size - keep.sum())
    if not keep.any():
        raise InvalidArgumentError("every reference entry is zero")
    if dropped:
        warnings.warn(f"mape: excluded {dropped} zero reference entries", RuntimeWarning,
                      stacklevel=2)
    return float(np.mean(np.abs(G[keep] - G_ref[keep]) / np.abs(G_ref[keep])))
