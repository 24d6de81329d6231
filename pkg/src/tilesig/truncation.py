"""Choosing the truncation order and bounding the resulting error."""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .tiles import MAX_ORDER, tile_coeffs, unit_series

MIN_SEARCH_ORDER = 8
DEFAULT_ORDER = 7
DEFAULT_TOL = 1e-12


def bessel_i0(x: float) -> float:
    """Modified Bessel function ``I0`` by its power series."""
    if x < 0:
        raise InvalidArgumentError("bessel_i0 needs x >= 0")
    q = (x / 2.0) ** 2
    total, term, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= q / (k * k)
        if term < sys.float_info.epsilon * total:
            return total
        total += term


def tail_estimate(max_abs_rho: float, N: int) -> float:
    """Heuristic error of an order-``N`` expansion on the worst tile.

    Builds the unit-boundary coefficient matrix one order higher and sums
    the absolute values of its last row and last column, i.e. the first
    terms dropped by truncating at ``N``.  Tile-local coordinates make the
    edge-length scalings equal to one.
    """
    n = N + 1
    C = tile_coeffs(abs(max_abs_rho), unit_series(n), unit_series(n), n)
    return float(abs(C[n, :].sum()) + abs(C[:, n].sum()))


def estimate_order(max_abs_rho: float, tol: float = DEFAULT_TOL) -> tuple[int, bool]:
    """Smallest order in ``[8, 64]`` whose tail estimate is below ``tol``.

    Returns ``(N, converged)``; when no order qualifies, ``(64, False)`` and
    a warning.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    if max_abs_rho < 0:
        raise InvalidArgumentError("max_abs_rho must be non-negative")
    for N in range(MIN_SEARCH_ORDER, MAX_ORDER + 1):
        # the estimate for order 64 needs order-65 coefficients
        if N == MAX_ORDER:
            est = 2 * _diag_term(max_abs_rho, N + 1)
        else:
            est = tail_estimate(max_abs_rho, N)
        if est < tol:
            return N, True
    warnings.warn(f"no order up to {MAX_ORDER} reaches tol={tol:g} "
                  f"for |rho|={max_abs_rho:g}", RuntimeWarning, stacklevel=2)
    return MAX_ORDER, False


def _diag_term(rho, n):
    if rho == 0:
        return 0.0
    log_t = n * math.log(abs(rho)) - 2 * math.lgamma(n + 1)
    return math.exp(log_t) if log_t < 709 else math.inf


@dataclass(frozen=True)
class TruncationPolicy:
    """Either a fixed order or an adaptive tolerance."""

    mode: str = "fixed"
    order: int = DEFAULT_ORDER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise InvalidArgumentError(f"unknown truncation mode {self.mode!r}")
        if self.mode == "fixed" and not 1 <= self.order <= MAX_ORDER:
            raise InvalidArgumentError(f"fixed order must lie in [1, {MAX_ORDER}]")
        if not self.tol > 0:
            raise InvalidArgumentError("tol must be positive")

    @classmethod
    def fixed(cls, order=DEFAULT_ORDER):
        return cls("fixed", order=int(order))

    @classmethod
    def adaptive(cls, tol=DEFAULT_TOL):
        return cls("adaptive", tol=float(tol))

    def resolve(self, max_abs_rho: float) -> tuple[int, bool]:
        if self.mode == "fixed":
            return self.order, True
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return estimate_order(max_abs_rho, self.tol)

    def to_dict(self):
        return {"mode": self.mode, "order": self.order if self.mode == "fixed" else None,
                "tol": self.tol if self.mode == "adaptive" else None}


@dataclass(frozen=True)
class ErrorBoundInputs:
    m: int
    ell: int
    max_x: float
    N: int


def gram_error_bound(inp: ErrorBoundInputs | None = None, *, m=None, ell=None,
                     max_x=None, N=None) -> float:
    """A-priori Frobenius bound on the order-``N`` Gram matrix error.

    ``gamma * max_x**(N+1) * zeta / ((N+1)!)**2`` with
    ``gamma = m/2 * prod_{nu=0}^{2 ell - 2} I0(2 sqrt(nu max_x) / (ell-1))`` and
    ``zeta = (1 + (2 ell - 2)/(N + 2)) * (2/(ell-1))**(N+1)``.
    ``max_x`` is the largest absolute increment product over all pairs.
    The formula is stated for the coefficient of the PDE on the unit
    square, which is the increment product times ``(ell-1)**2``; that
    rescaling is applied here before evaluating.
    """
    if inp is None:
        inp = ErrorBoundInputs(m, ell, max_x, N)
    m, ell, X, N = inp.m, inp.ell, float(inp.max_x), inp.N
    if m < 1 or ell < 2 or X < 0 or N < 0:
        raise InvalidArgumentError(f"invalid bound inputs {inp}")
    if X == 0:
        return 0.0
    X *= (ell - 1) ** 2
    # m/2 stays outside the logarithm so the bound is exactly linear in m
    log_prod = sum(
        math.log(bessel_i0(2 * math.sqrt(nu * X) / (ell - 1))) for nu in range(2 * ell - 1))
    log_zeta = math.log1p((2 * ell - 2) / (N + 2)) + (N + 1) * math.log(2 / (ell - 1))
    log_rest = log_prod + (N + 1) * math.log(X) + log_zeta - 2 * math.lgamma(N + 2)
    return (m / 2) * math.exp(log_rest) if log_rest < 709 else math.inf


def max_abs_increment_product(family) -> float:
    """Largest ``|<dx_k, dy_l>|`` over all ordered pairs in ``family``."""
    from .paths import increments
    incs = [increments(s) for s in family]
    best = 0.0
    for i, a in enumerate(incs):
        for b in incs[i:]:
            best = max(best, float(np.max(np.abs(a @ b.T))))
    return best
