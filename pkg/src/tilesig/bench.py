"""Timing, memory-counter and accuracy table over series lengths."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datagen import DEFAULT_SEED, brownian
from .errors import ResourceError
from .oracles import truncated_signature_kernel
from .wavefront import propagate

ORACLE_MAX_LENGTH = 64
ORACLE_LEVEL = 20
COLUMNS = ("ell", "d", "N", "mean_s", "stdev_s", "peak_live_series", "mape")


@dataclass
class BenchRow:
    ell: int
    d: int
    N: int
    mean_s: float
    stdev_s: float
    peak_live_series: int
    mape: float | None

    def as_list(self):
        return [self.ell, self.d, self.N, repr(self.mean_s), repr(self.stdev_s),
                self.peak_live_series, "" if self.mape is None else repr(self.mape)]


def bench_one(ell: int, d: int, N: int, repeats: int, seed: int = DEFAULT_SEED,
              threads: int = 1, with_oracle: bool = True) -> BenchRow:
    """Time ``repeats`` kernel evaluations on one Brownian pair.

    The oracle column compares against the level-20 truncated signature
    kernel when ``ell <= 64`` and the tensors fit the memory budget.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    x = brownian(ell, d, seed)
    y = brownian(ell, d, seed + 1)
    propagate(x, y, N, threads)  # warm-up; compiled code is cached on disk
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        r = propagate(x, y, N, threads)
        times.append(time.perf_counter() - t0)
    err = None
    if with_oracle and ell <= ORACLE_MAX_LENGTH:
        try:
            ref = truncated_signature_kernel(x, y, ORACLE_LEVEL)
            err = float(abs(r.value - ref) / abs(ref)) if ref else None
        except ResourceError:
            err = None
    sd = statistics.stdev(times) if len(times) > 1 else 0.0
    return BenchRow(ell, d, r.order, statistics.fmean(times), sd, r.peak_live_series, err)


def run_bench(lengths, dims, N: int = 7, repeats: int = 10, seed: int = DEFAULT_SEED,
              threads: int = 1, with_oracle: bool = True) -> list[BenchRow]:
    return [bench_one(ell, d, N, repeats, seed, threads, with_oracle)
            for d in dims for ell in lengths]


def write_csv(rows, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow(row.as_list())


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def linear_r2(xs, ys) -> float:
    """Coefficient of determination of a straight-line fit."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    coef = np.polyfit(xs, ys, 1)
    resid = ys - np.polyval(coef, xs)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    return 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
