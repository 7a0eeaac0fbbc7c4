import numpy as np
import pytest

from mcflow.contour import extract_front
from mcflow.grid import GeometrySet, ScalarField, box_grid, distance_field


def circle_field(nx=81, radius=1.0):
    g = box_grid(nx)
    return distance_field(GeometrySet.circle((0.0, 0.0), radius), g)


def test_negative_level_rejected():
    with pytest.raises(ValueError):
        extract_front(circle_field(), -0.1)


def test_circle_contour_radii():
    u = circle_field(nx=161)
    h = u.grid.hmin
    eta = 2 * h
    f = extract_front(u, eta)
    assert not f.is_empty
    r = f.radii()
    # the eta-sublevel boundary is the pair of circles radius 1 -+ eta
    inner = r[r < 1.0]
    outer = r[r >= 1.0]
    assert np.abs(inner - (1.0 - eta)).max() < h
    assert np.abs(outer - (1.0 + eta)).max() < h


def test_contours_are_closed_loops():
    f = extract_front(circle_field(nx=81), 0.05)
    assert len(f.polylines) == 2
    for poly in f.polylines:
        assert np.allclose(poly[0], poly[-1])


def test_marked_nodes_monotone_in_eta():
    u = circle_field()
    counts = [len(extract_front(u, eta).marked_nodes)
              for eta in (0.01, 0.05, 0.1, 0.2)]
    assert counts == sorted(counts)


def test_open_contour_at_box_edge():
    g = box_grid(41)
    x, _ = g.mesh()
    u = ScalarField(g, np.abs(x))  # band crosses the whole box
    f = extract_front(u, 0.1)
    assert len(f.polylines) == 2
    for poly in f.polylines:
        assert not np.allclose(poly[0], poly[-1])  # open path, not a loop
        assert np.ptp(poly[:, 1]) > 2.9            # spans the box in y


def test_vertex_interpolation_subcell():
    # vertices sit on the exact crossing, not on nodes
    g = box_grid(31)
    x, _ = g.mesh()
    u = ScalarField(g, np.abs(x + 0.013))
    f = extract_front(u, 0.1)
    xs = np.concatenate([p[:, 0] for p in f.polylines])
    left = xs[xs < -0.013]
    right = xs[xs >= -0.013]
    assert np.abs(left - (-0.113)).max() < 1e-9
    assert np.abs(right - 0.087).max() < 1e-9


def test_empty_front():
    g = box_grid(21)
    u = ScalarField(g, np.full(g.dims, 1.0))
    f = extract_front(u, 0.5)
    assert f.is_empty
    assert len(f.marked_nodes) == 0


def test_3d_sphere_front():
    g = box_grid(41, ndim=3)
    u = distance_field(GeometrySet.sphere((0.0, 0.0, 0.0), 1.0), g)
    f = extract_front(u, 0.1)
    assert f.triangles is not None
    r = f.radii()
    assert 0.85 < r.min() < 0.95
    assert 1.05 < r.max() < 1.15
