"""On-demand validation suites comparing the sweep against the oracles.

Each suite returns a list of :class:`CaseResult`; a suite passes when every
case does.  Random inputs come from the package PRNG, so a seed fully
determines a run.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np

from .datagen import DEFAULT_SEED, Xoshiro256
from .oracles import (bessel_series_kernel, goursat_fd_solve, truncated_signature_kernel,
                      two_tile_closed_form)
from .paths import TimeSeries, pad_to_length
from .tiles import weight_fault
from .truncation import gram_error_bound
from .wavefront import propagate

SUITES = ("closed-form", "oracle-triangle", "bound", "invariance")
DEFAULT_CASES = {"closed-form": 100, "oracle-triangle": 20, "bound": 50, "invariance": 20}
CLOSED_FORM_RHOS = (-4.0, -1.0, -0.1, 0.0, 0.1, 1.0, 4.0)


@dataclass
class CaseResult:
    suite: str
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.suite}/{self.name}: max_err={self.error:.3e} tol={self.tol:.1e}"


def random_series(rng: Xoshiro256, length: int, dim: int, max_norm: float) -> TimeSeries:
    """Series from the origin whose increments have Euclidean norm ``<= max_norm``."""
    incs = rng.normals((length - 1, dim))
    norms = np.linalg.norm(incs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = np.array([[max_norm * rng.uniform()] for _ in range(length - 1)])
    incs = incs / norms * radii
    return TimeSeries(np.vstack([np.zeros((1, dim)), np.cumsum(incs, axis=0)]))


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _scaled(a, b):
    # relative for |b| >= 1, absolute below; kernels can cross zero
    return abs(a - b) / max(abs(b), 1.0)


def closed_form(cases: int, seed: int, tol: float | None = None) -> list[CaseResult]:
    """Single-tile Bessel series and the two-tile closed form at order 24."""
    out = []
    t = 1e-12 if tol is None else tol
    err = 0.0
    for rho in CLOSED_FORM_RHOS:
        x = np.array([[0.0], [1.0]])
        y = np.array([[0.0], [rho]])
        err = max(err, abs(propagate(x, y, 24).value - bessel_series_kernel(rho, 24)))
    out.append(CaseResult("closed-form", "single-tile", err, t))

    rng = Xoshiro256(seed)
    t = 1e-10 if tol is None else tol
    err_cf = err_re = 0.0
    for _ in range(cases):
        a = 2 * rng.uniform() - 1
        b1 = 2 * rng.uniform() - 1
        b2 = 2 * rng.uniform() - 1
        x = np.array([[0.0], [a]])
        y = np.array([[0.0], [b1], [b1 + b2]])
        v = propagate(x, y, 24).value
        err_cf = max(err_cf, abs(v - two_tile_closed_form(a * b1, a * b2, 24)))
        err_re = max(err_re, abs(v - bessel_series_kernel(a * (b1 + b2), 24)))
    out.append(CaseResult("closed-form", "two-tile", err_cf, t))
    out.append(CaseResult("closed-form", "two-tile-reparam", err_re, t))
    return out


def oracle_triangle(cases: int, seed: int, tol: float | None = None,
                    max_len: int = 10, refinement: int = 64) -> list[CaseResult]:
    """Sweep vs truncated signature (level 20) vs finite differences.

    The finite-difference legs use ``|a - b| / max(|b|, 1)`` since a
    second-order solver cannot be relatively accurate where the kernel
    passes near zero.
    """
    rng = Xoshiro256(seed)
    e_sig = e_fd_tile = e_fd_sig = 0.0
    for _ in range(cases):
        lx = 2 + int(rng.uniform() * (max_len - 1))
        ly = 2 + int(rng.uniform() * (max_len - 1))
        x = random_series(rng, min(lx, max_len), 2, 0.8)
        y = random_series(rng, min(ly, max_len), 2, 0.8)
        v = propagate(x, y, 24).value
        s = truncated_signature_kernel(x, y, 20)
        f = goursat_fd_solve(x, y, refinement)
        e_sig = max(e_sig, _rel(v, s))
        e_fd_tile = max(e_fd_tile, _scaled(f, v))
        e_fd_sig = max(e_fd_sig, _scaled(f, s))
    return [
        CaseResult("oracle-triangle", "tile-vs-signature", e_sig, 1e-8 if tol is None else tol),
        CaseResult("oracle-triangle", "fd-vs-tile", e_fd_tile, 1e-4 if tol is None else tol),
        CaseResult("oracle-triangle", "fd-vs-signature", e_fd_sig, 1e-4 if tol is None else tol),
    ]


def bound(cases: int, seed: int, tol: float | None = None,
          orders=(8, 12, 16)) -> list[CaseResult]:
    """Truncation error against the a-priori bound.

    The reported error is the largest ratio ``|K_N - K_64| / bound``; it
    must not exceed one.
    """
    rng = Xoshiro256(seed)
    worst = {N: 0.0 for N in orders}
    for _ in range(cases):
        ell = 2 + int(rng.uniform() * 7)
        d = 1 + int(rng.uniform() * 3)
        # increment norms <= 1 keep every product within [-1, 1]
        x = random_series(rng, ell, d, 1.0)
        y = random_series(rng, ell, d, 1.0)
        ref = propagate(x, y, 64)
        for N in orders:
            b = gram_error_bound(m=1, ell=ell, max_x=ref.max_abs_rho, N=N)
            e = abs(propagate(x, y, N).value - ref.value)
            worst[N] = max(worst[N], e / b if b > 0 else (math.inf if e > 0 else 0.0))
    return [CaseResult("bound", f"N={N}", worst[N], 1.0 if tol is None else tol)
            for N in orders]


def invariance(cases: int, seed: int, tol: float | None = None) -> list[CaseResult]:
    """Symmetry, padding, reparametrization and thread-count invariance."""
    rng = Xoshiro256(seed)
    e_sym = e_pad = e_rep = e_thr = 0.0
    for _ in range(cases):
        ell = 2 + int(rng.uniform() * 15)
        x = random_series(rng, ell, 2, 0.8)
        y = random_series(rng, ell, 2, 0.8)
        v = propagate(x, y, 16).value
        e_sym = max(e_sym, _rel(propagate(y, x, 16).value, v))
        e_pad = max(e_pad, _rel(propagate(pad_to_length(x, ell + 3), y, 16).value, v))
        # inserting the midpoint of every segment leaves the path unchanged
        pts = x.points
        mids = (pts[:-1] + pts[1:]) / 2
        fine = np.empty((2 * ell - 1, 2))
        fine[0::2], fine[1::2] = pts, mids
        e_rep = max(e_rep, _rel(propagate(fine, pad_to_length(y, 2 * ell - 1), 24).value,
                                propagate(x, y, 24).value))
        e_thr = max(e_thr, abs(propagate(x, y, 16, threads=4).value - v))
    t = 1e-12 if tol is None else tol
    return [
        CaseResult("invariance", "symmetry", e_sym, t),
        CaseResult("invariance", "padding", e_pad, t),
        CaseResult("invariance", "reparametrization", e_rep, 1e-10 if tol is None else tol),
        CaseResult("invariance", "threads-bitwise", e_thr, 0.0),
    ]


_RUNNERS = {"closed-form": closed_form, "oracle-triangle": oracle_triangle,
            "bound": bound, "invariance": invariance}


def run_suite(suite: str, seed: int = DEFAULT_SEED, cases: int | None = None,
              tol: float | None = None, inject_fault: bool = False) -> list[CaseResult]:
    """Run one named suite; ``inject_fault`` corrupts the weight table first."""
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    n = DEFAULT_CASES[suite] if cases is None else cases
    ctx = weight_fault() if inject_fault else contextlib.nullcontext()
    with ctx:
        return _RUNNERS[suite](n, seed, tol)
