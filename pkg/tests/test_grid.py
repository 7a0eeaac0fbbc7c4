import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcflow.grid import (GeometrySet, Grid, ScalarField, box_grid, cap,
                         distance_field, field_max, field_min, load_field,
                         make_grid, pointwise_clamp, save_field)


def test_box_grid_geometry():
    g = box_grid(121)
    assert g.dims == (121, 121)
    assert g.spacing == (0.025, 0.025)
    assert g.origin == (-1.5, -1.5)
    assert g.axis_coords(0)[0] == -1.5
    assert g.axis_coords(0)[-1] == pytest.approx(1.5)
    assert g.hmin == 0.025
    assert g.n_nodes == 121 * 121


def test_grid_validation():
    with pytest.raises(ValueError):
        make_grid((5,), 0.1, 0.0)          # 1D unsupported
    with pytest.raises(ValueError):
        make_grid((2, 5), 0.1, 0.0)        # too few nodes
    with pytest.raises(ValueError):
        make_grid((5, 5), -0.1, 0.0)       # bad spacing


def test_scalar_field_validation():
    g = box_grid(17)
    with pytest.raises(ValueError):
        ScalarField(g, np.zeros(10))
    with pytest.raises(ValueError):
        ScalarField(g, np.full(g.dims, np.nan))
    f = ScalarField(g, np.zeros(g.n_nodes))
    assert f.values.shape == g.dims


def test_circle_distance_exact():
    g = box_grid(81)
    d = distance_field(GeometrySet.circle((0.0, 0.0), 1.0), g)
    x, y = g.mesh()
    expect = np.abs(np.sqrt(x ** 2 + y ** 2) - 1.0)
    assert np.allclose(d.values, expect, atol=1e-12)


def test_point_cloud_distance():
    g = box_grid(33)
    d = distance_field(GeometrySet.from_points([(0.0, 0.0), (1.0, 1.0)]), g)
    x, y = g.mesh()
    expect = np.minimum(np.hypot(x, y), np.hypot(x - 1.0, y - 1.0))
    assert np.allclose(d.values, expect, atol=1e-12)


def test_segment_distance():
    g = box_grid(33)
    d = distance_field(GeometrySet.segment((-1.0, 0.0), (1.0, 0.0)), g)
    x, y = g.mesh()
    expect = np.where(np.abs(x) <= 1.0, np.abs(y),
                      np.hypot(np.abs(x) - 1.0, y))
    assert np.allclose(d.values, expect, atol=1e-12)


def test_polyline_matches_segment():
    g = box_grid(33)
    seg = distance_field(GeometrySet.segment((-1.0, 0.0), (1.0, 0.0)), g)
    poly = distance_field(GeometrySet.from_polylines(
        [np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])]), g)
    assert np.allclose(seg.values, poly.values, atol=1e-12)


def test_cap_and_min_max():
    g = box_grid(33)
    d = distance_field(GeometrySet.circle((0.0, 0.0), 1.0), g)
    c = cap(d, 0.3)
    assert c.max() <= 0.3
    assert np.all(c.values <= d.values)
    with pytest.raises(ValueError):
        cap(d, -1.0)
    lo = field_min(d, 0.1)
    hi = field_max(d, 0.1)
    assert np.all(lo.values <= 0.1)
    assert np.all(hi.values >= 0.1)


def test_pointwise_clamp_rejects_crossed_bounds():
    g = box_grid(17)
    f = ScalarField(g, np.zeros(g.dims))
    with pytest.raises(ValueError):
        pointwise_clamp(f, lo=1.0, hi=0.0)
    out = pointwise_clamp(f, lo=-1.0, hi=1.0)
    assert np.all(out.values == 0.0)


def test_save_load_roundtrip(tmp_path):
    g = box_grid(17)
    f = distance_field(GeometrySet.circle((0.1, -0.2), 0.7), g)
    p = tmp_path / "field.csv"
    save_field(f, p)
    back = load_field(p)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


def test_geometry_validation():
    with pytest.raises(ValueError):
        GeometrySet.circle((0, 0), -1.0)
    with pytest.raises(ValueError):
        GeometrySet.from_points([])
    with pytest.raises(ValueError):
        GeometrySet("nonsense")


@settings(max_examples=25, deadline=None)
@given(cx=st.floats(-1, 1), cy=st.floats(-1, 1), r=st.floats(0.1, 1.0))
def test_distance_is_one_lipschitz_on_grid(cx, cy, r):
    g = box_grid(21)
    d = distance_field(GeometrySet.circle((cx, cy), r), g).values
    for axis, h in enumerate(g.spacing):
        slope = np.abs(np.diff(d, axis=axis)) / h
        assert slope.max() <= 1.0 + 1e-9
