"""Rectilinear grids, scalar fields, geometry primitives and distance fields.

Distance fields are computed by exact brute force (closed forms for analytic
shapes, min over primitives otherwise); grids stay small enough that no fast
sweeping is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "ScalarField",
    "GeometrySet",
    "make_grid",
    "box_grid",
    "distance_field",
    "cap",
    "field_min",
    "field_max",
    "pointwise_clamp",
    "save_field",
    "load_field",
]


@dataclass(frozen=True)
class Grid:
    """Vertex-centered rectilinear grid in 2 or 3 dimensions."""

    dims: tuple
    spacing: tuple
    origin: tuple

    def __post_init__(self):
        if len(self.dims) not in (2, 3):
            raise ValueError(f"grid must be 2D or 3D, got {len(self.dims)} axes")
        if len(self.spacing) != len(self.dims) or len(self.origin) != len(self.dims):
            raise ValueError("dims, spacing and origin must have the same length")
        if any(int(d) < 3 for d in self.dims):
            raise ValueError(f"every dim must be >= 3, got {self.dims}")
        if any(s <= 0 for s in self.spacing):
            raise ValueError(f"every spacing must be > 0, got {self.spacing}")

    @property
    def ndim(self):
        return len(self.dims)

    @property
    def shape(self):
        return self.dims

    @property
    def n_nodes(self):
        return int(np.prod(self.dims))

    @property
    def hmin(self):
        return min(self.spacing)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axis_coords(self, axis):
        return self.origin[axis] + self.spacing[axis] * np.arange(self.dims[axis])

    def node_coord(self, index):
        """Physical coordinates of a node index tuple."""
        return tuple(self.origin[k] + index[k] * self.spacing[k] for k in range(self.ndim))

    def mesh(self):
        return np.meshgrid(*(self.axis_coords(k) for k in range(self.ndim)), indexing="ij")

    def points(self):
        """(n_nodes, ndim) array of node coordinates, row-major node order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=1)


def make_grid(dims, spacing, origin):
    """Build a validated Grid; scalar spacing/origin broadcast to all axes."""
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    n = len(dims)
    spacing = tuple(float(s) for s in np.broadcast_to(np.asarray(spacing, dtype=float), (n,)))
    origin = tuple(float(o) for o in np.broadcast_to(np.asarray(origin, dtype=float), (n,)))
    return Grid(dims, spacing, origin)


def box_grid(nx, half_width=1.5, ndim=2):
    """Uniform grid with nx nodes per axis on [-half_width, half_width]^ndim."""
    h = 2.0 * half_width / (nx - 1)
    return make_grid((nx,) * ndim, (h,) * ndim, (-half_width,) * ndim)


@dataclass(eq=False)
class ScalarField:
    """One finite real value per grid node."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.n_nodes:
            raise ValueError(f"values size {v.size} != node count {self.grid.n_nodes}")
        v = v.reshape(self.grid.dims)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must all be finite")
        self.values = v

    def with_values(self, values):
        return ScalarField(self.grid, values)

    def copy(self):
        return ScalarField(self.grid, self.values.copy())

    def min(self):
        return float(self.values.min())

    def max(self):
        return float(self.values.max())


def _point_segment_distance(pts, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip((pts - a) @ ab / denom, 0.0, 1.0)
    return np.linalg.norm(pts - (a + t[:, None] * ab), axis=1)


class GeometrySet:
    """Closed set built from points, segments, polylines or analytic circles/spheres.

    Houses both the initial front and the prescribed boundary set.
    """

    KINDS = ("point-cloud", "polyline-set", "analytic-circle", "analytic-sphere", "analytic-segment")

    def __init__(self, kind, *, points=None, polylines=None, center=None, radius=None, endpoints=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown geometry kind {kind!r}")
        self.kind = kind
        self.points_data = None if points is None else np.atleast_2d(np.asarray(points, dtype=float))
        self.polylines_data = None
        if polylines is not None:
            self.polylines_data = [np.atleast_2d(np.asarray(p, dtype=float)) for p in polylines]
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.radius = None if radius is None else float(radius)
        self.endpoints = None if endpoints is None else np.asarray(endpoints, dtype=float)
        self._validate()

    def _validate(self):
        if self.kind == "point-cloud":
            if self.points_data is None or self.points_data.size == 0:
                raise ValueError("point cloud must be nonempty")
        elif self.kind == "polyline-set":
            if not self.polylines_data:
                raise ValueError("polyline set must be nonempty")
            for p in self.polylines_data:
                if len(p) < 2:
                    raise ValueError("polylines need at least 2 vertices")
        elif self.kind in ("analytic-circle", "analytic-sphere"):
            if self.radius is None or self.radius <= 0:
                raise ValueError("radius must be > 0")
            if self.center is None:
                raise ValueError("center required")
        elif self.kind == "analytic-segment":
            if self.endpoints is None or self.endpoints.shape[0] != 2:
                raise ValueError("segment needs exactly 2 endpoints")

    @classmethod
    def from_points(cls, points):
        return cls("point-cloud", points=points)

    @classmethod
    def from_polylines(cls, polylines):
        return cls("polyline-set", polylines=polylines)

    @classmethod
    def circle(cls, center, radius):
        return cls("analytic-circle", center=center, radius=radius)

    @classmethod
    def sphere(cls, center, radius):
        return cls("analytic-sphere", center=center, radius=radius)

    @classmethod
    def segment(cls, a, b):
        return cls("analytic-segment", endpoints=np.stack([np.asarray(a, float), np.asarray(b, float)]))

    def distance_to(self, pts):
        """Exact Euclidean distance from each query point to the set."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "point-cloud":
            d = None
            # chunk over set points to bound memory on big clouds
            for start in range(0, len(self.points_data), 256):
                block = self.points_data[start:start + 256]
                db = np.linalg.norm(pts[:, None, :] - block[None, :, :], axis=2).min(axis=1)
                d = db if d is None else np.minimum(d, db)
            return d
        if self.kind == "polyline-set":
            d = None
            for poly in self.polylines_data:
                for a, b in zip(poly[:-1], poly[1:]):
                    db = _point_segment_distance(pts, a, b)
                    d = db if d is None else np.minimum(d, db)
            return d
        if self.kind in ("analytic-circle", "analytic-sphere"):
            return np.abs(np.linalg.norm(pts - self.center, axis=1) - self.radius)
        if self.kind == "analytic-segment":
            return _point_segment_distance(pts, self.endpoints[0], self.endpoints[1])
        raise AssertionError(self.kind)

    def sample(self, step):
        """Points sampled along the set at spacing <= step (for set-to-set metrics)."""
        if self.kind == "point-cloud":
            return self.points_data.copy()
        if self.kind == "analytic-circle":
            n = max(8, int(math.ceil(2.0 * math.pi * self.radius / step)))
            th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
            ring = np.stack([np.cos(th), np.sin(th)], axis=1) * self.radius
            return self.center[None, :2] + ring
        if self.kind == "analytic-segment":
            a, b = self.endpoints
            n = max(2, int(math.ceil(np.linalg.norm(b - a) / step)) + 1)
            t = np.linspace(0.0, 1.0, n)
            return a[None, :] + t[:, None] * (b - a)[None, :]
        if self.kind == "polyline-set":
            out = []
            for poly in self.polylines_data:
                for a, b in zip(poly[:-1], poly[1:]):
                    n = max(2, int(math.ceil(np.linalg.norm(b - a) / step)) + 1)
                    t = np.linspace(0.0, 1.0, n)
                    out.append(a[None, :] + t[:, None] * (b - a)[None, :])
            return np.concatenate(out, axis=0)
        raise ValueError(f"cannot sample geometry of kind {self.kind}")


def distance_field(geometry, grid):
    """Exact distance from every grid node to the geometry."""
    d = geometry.distance_to(grid.points())
    return ScalarField(grid, d.reshape(grid.dims))


def cap(field, delta):
    """Pointwise min with the cap value delta."""
    if delta <= 0:
        raise ValueError(f"cap value must be > 0, got {delta}")
    return field.with_values(np.minimum(field.values, delta))


def _as_values(other, grid):
    if isinstance(other, ScalarField):
        if other.grid != grid:
            raise ValueError("fields live on different grids")
        return other.values
    return np.full(grid.dims, float(other))


def field_min(field, other):
    return field.with_values(np.minimum(field.values, _as_values(other, field.grid)))


def field_max(field, other):
    return field.with_values(np.maximum(field.values, _as_values(other, field.grid)))


def pointwise_clamp(field, lo=None, hi=None):
    """min(max(input, lo), hi) pointwise; lo/hi are fields, constants, or None."""
    v = field.values
    lov = None if lo is None else _as_values(lo, field.grid)
    hiv = None if hi is None else _as_values(hi, field.grid)
    if lov is not None and hiv is not None:
        gap = lov - hiv
        if gap.max() > 0:
            idx = np.unravel_index(int(np.argmax(gap)), field.grid.dims)
            raise ValueError(f"lower bound exceeds upper bound at node {idx} by {gap.max():.3e}")
    if lov is not None:
        v = np.maximum(v, lov)
    if hiv is not None:
        v = np.minimum(v, hiv)
    return field.with_values(v)


def save_field(field, path):
    """Snapshot file: header `n,dims...,spacings...,origin...`, then one grid
    row of values per line, 17 significant digits."""
    g = field.grid
    head = [str(g.ndim)]
    head += [str(d) for d in g.dims]
    head += [f"{s:.17g}" for s in g.spacing]
    head += [f"{o:.17g}" for o in g.origin]
    rows = field.values.reshape(-1, g.dims[-1])
    with open(path, "w") as fh:
        fh.write(",".join(head) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_field(path):
    with open(path) as fh:
        head = fh.readline().strip().split(",")
        n = int(head[0])
        dims = tuple(int(x) for x in head[1:1 + n])
        spacing = tuple(float(x) for x in head[1 + n:1 + 2 * n])
        origin = tuple(float(x) for x in head[1 + 2 * n:1 + 3 * n])
        values = np.loadtxt(fh, delimiter=",", ndmin=2)
    grid = Grid(dims, spacing, origin)
    return ScalarField(grid, values.reshape(dims))
