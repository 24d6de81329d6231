import numpy as np
import pytest

from tilesig.bench import bench_one, linear_r2, loglog_slope, run_bench
from tilesig.validate import SUITES, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_suites_pass_on_small_runs(suite):
    cases = run_suite(suite, seed=3, cases=4)
    assert cases and all(c.passed for c in cases), [c.line() for c in cases]


def test_fault_hook_breaks_every_suite_that_checks_values():
    for suite in ("closed-form", "oracle-triangle", "invariance"):
        cases = run_suite(suite, seed=3, cases=3, inject_fault=True)
        assert not all(c.passed for c in cases), suite


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")


def test_fit_helpers():
    xs = np.array([1.0, 2.0, 4.0, 8.0])
    assert loglog_slope(xs, 3 * xs ** 2) == pytest.approx(2.0)
    assert linear_r2(xs, 5 * xs + 1) == pytest.approx(1.0)
    assert linear_r2(xs, [1.0, 1.0, 1.0, 1.0]) == 1.0


def test_bench_rows():
    rows = run_bench([3, 5], [1, 2], N=7, repeats=2)
    assert [(r.ell, r.d) for r in rows] == [(3, 1), (5, 1), (3, 2), (5, 2)]
    assert all(r.peak_live_series == 2 * r.ell for r in rows)
    assert all(r.mape is not None and r.mape < 1e-3 for r in rows)
    assert bench_one(65, 2, 7, 1).mape is None
