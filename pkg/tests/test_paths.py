import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tilesig.errors import InvalidArgumentError, ParseError
from tilesig.paths import (IncrementTable, TileGrid, TimeSeries, increments, load_csv,
                           pad_common, pad_to_length, save_csv)

finite = st.floats(-10, 10, allow_nan=False)


def series(min_len=2, max_len=12, dim=2):
    return arrays(np.float64, st.tuples(st.integers(min_len, max_len), st.just(dim)),
                  elements=finite)


def test_one_dimensional_input_becomes_column():
    ts = TimeSeries([0.0, 1.0, 3.0])
    assert ts.points.shape == (3, 1)
    assert ts.length == 3 and ts.dim == 1


def test_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        TimeSeries([[0.0], [np.nan]])


def test_points_are_read_only():
    ts = TimeSeries([[0.0], [1.0]])
    with pytest.raises(ValueError):
        ts.points[0, 0] = 5.0


@pytest.mark.parametrize("pts, L, expected", [
    ([[0.0], [1.0]], 2, [[0.0], [1.0]]),
    ([[0.0], [1.0]], 4, [[0.0], [1.0], [1.0], [1.0]]),
    ([[0.0, 0.0]], 3, [[0.0, 0.0]] * 3),
])
def test_pad_to_length(pts, L, expected):
    assert np.array_equal(pad_to_length(pts, L).points, expected)


def test_pad_down_is_an_error():
    with pytest.raises(InvalidArgumentError):
        pad_to_length([[0.0], [1.0], [2.0]], 2)


def test_pad_common_matches_longest():
    a, b = pad_common([[0.0], [1.0]], [[0.0], [2.0], [5.0]])
    assert a.length == b.length == 3


@pytest.mark.parametrize("pts, expected", [
    ([[0.0], [1.0], [3.0]], [[1.0], [2.0]]),
    ([[2.0, 2.0]] * 4, [[0.0, 0.0]] * 3),
    ([[0.0, 0.0], [1.0, 2.0]], [[1.0, 2.0]]),
])
def test_increments(pts, expected):
    assert np.array_equal(increments(pts), expected)


def test_single_point_has_no_increments():
    with pytest.raises(InvalidArgumentError):
        increments([[1.0, 2.0]])


def test_tile_grid_knots():
    g = TileGrid(5, 3)
    assert g.sigma(0) == 0.0 and g.sigma(4) == 1.0 and g.tau(2) == 1.0
    assert g.n_tiles == 8
    assert g.tile(1, 0) == ((0.25, 0.5), (0.0, 0.5))
    with pytest.raises(InvalidArgumentError):
        g.tile(4, 0)


@pytest.mark.parametrize("dx, dy, expected", [
    ([1.0, 0.0], [0.0, 1.0], 0.0),
    ([1.0], [1.0], 1.0),
    ([0.0, 0.0], [3.0, -2.0], 0.0),
])
def test_rho_examples(dx, dy, expected):
    x = np.vstack([np.zeros(len(dx)), dx])
    y = np.vstack([np.zeros(len(dy)), dy])
    assert IncrementTable(x, y).rho(0, 0) == expected


def test_rho_out_of_range():
    t = IncrementTable([[0.0], [1.0]], [[0.0], [1.0]])
    with pytest.raises(InvalidArgumentError):
        t.rho(1, 0)


def test_rho_matches_materialized_table_exhaustively():
    rng = np.random.default_rng(0)
    for ell in (2, 7, 64):
        x = rng.normal(size=(ell, 3))
        y = rng.normal(size=(ell, 3))
        t = IncrementTable(x, y)
        full = t.materialize()
        assert full.shape == (ell - 1, ell - 1)
        for k in range(ell - 1):
            for l in range(ell - 1):
                assert t.rho(k, l) == full[k, l]
        assert t.max_abs_rho == np.abs(full).max()


@settings(max_examples=50, deadline=None)
@given(series(), series(), st.floats(-5, 5, allow_nan=False))
def test_rho_is_bilinear(x, y, c):
    x, y = pad_common(x, y)
    base = IncrementTable(x, y).materialize()
    scaled = IncrementTable(x.points * c, y).materialize()
    assert np.allclose(scaled, c * base, rtol=1e-12, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(series(max_len=8))
def test_midpoint_split_preserves_increment(x):
    pts = x
    mids = (pts[:-1] + pts[1:]) / 2
    fine = np.empty((2 * len(pts) - 1, pts.shape[1]))
    fine[0::2], fine[1::2] = pts, mids
    inc = increments(fine)
    assert np.allclose(inc[0::2] + inc[1::2], increments(pts), atol=1e-12)


def test_load_csv_examples(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("0\n1\n")
    assert load_csv(p) == TimeSeries([[0.0], [1.0]])
    p.write_text("0,0\n1,2\n")
    assert load_csv(p).dim == 2
    p.write_text("x,y\n0,0\n1,2\n")
    assert load_csv(p).length == 2


@pytest.mark.parametrize("text, row, col", [
    ("0,0\n1\n", 2, None),
    ("0\nabc\n", 2, 1),
    ("0,1\n2,inf\n", 2, 2),
])
def test_load_csv_errors_report_location(tmp_path, text, row, col):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ParseError) as info:
        load_csv(p)
    assert info.value.row == row and info.value.column == col


def test_load_csv_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(ParseError):
        load_csv(p)


@settings(max_examples=30, deadline=None)
@given(series(min_len=1, dim=3))
def test_csv_round_trip_is_exact(tmp_path_factory, pts):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    save_csv(pts, p, header=["a", "b", "c"])
    assert load_csv(p) == TimeSeries(pts)
