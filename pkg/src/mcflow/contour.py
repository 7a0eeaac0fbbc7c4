"""Sublevel-set front extraction.

2D fronts are traced with marching squares (vertices on grid edges by linear
interpolation); 3D fronts are a triangle soup from marching cubes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField

__all__ = ["FrontSet", "extract_front"]


@dataclass(eq=False)
class FrontSet:
    """Discrete sublevel-set boundary: marked nodes plus subcell contour."""

    level: float
    marked_nodes: np.ndarray           # (m, ndim) integer node indices with u <= level
    polylines: list = field(default_factory=list)   # 2D: list of (k, 2) vertex arrays
    triangles: tuple | None = None     # 3D: (verts (m,3), faces (f,3))

    @property
    def vertices(self):
        if self.triangles is not None:
            return self.triangles[0]
        if not self.polylines:
            return np.zeros((0, 2))
        return np.concatenate(self.polylines, axis=0)

    @property
    def is_empty(self):
        return len(self.vertices) == 0

    def radii(self, center=None):
        v = self.vertices
        if center is not None:
            v = v - np.asarray(center, dtype=float)
        return np.linalg.norm(v, axis=1)


# marching-squares case table: inside bits (b00, b10, b11, b01) -> edge pairs,
# edges named s(outh) e(ast) n(orth) w(est); ambiguous cases resolved by the
# cell-center average at lookup time
_CASES = {
    1: [("w", "s")],
    2: [("s", "e")],
    3: [("w", "e")],
    4: [("e", "n")],
    6: [("s", "n")],
    7: [("w", "n")],
    8: [("n", "w")],
    9: [("s", "n")],
    11: [("e", "n")],
    12: [("e", "w")],
    13: [("s", "e")],
    14: [("w", "s")],
}


def _edge_key(kind, i, j):
    # kind 0: edge (i,j)-(i+1,j); kind 1: edge (i,j)-(i,j+1)
    return (kind, i, j)


def _march_squares(values, grid, level):
    v = values - level
    inside = v < 0.0
    xs = grid.axis_coords(0)
    ys = grid.axis_coords(1)

    # crossing coordinates per edge with a sign change
    verts = {}

    def vertex_on(kind, i, j):
        key = (kind, i, j)
        p = verts.get(key)
        if p is None:
            if kind == 0:
                a, b = v[i, j], v[i + 1, j]
                t = a / (a - b)
                p = (xs[i] + t * (xs[i + 1] - xs[i]), ys[j])
            else:
                a, b = v[i, j], v[i, j + 1]
                t = a / (a - b)
                p = (xs[i], ys[j] + t * (ys[j + 1] - ys[j]))
            verts[key] = p
        return key, p

    b00 = inside[:-1, :-1]
    b10 = inside[1:, :-1]
    b11 = inside[1:, 1:]
    b01 = inside[:-1, 1:]
    case = (b00.astype(np.int8) + 2 * b10 + 4 * b11 + 8 * b01)
    mixed = np.argwhere((case != 0) & (case != 15))

    segments = []
    for i, j in mixed:
        c = int(case[i, j])
        if c in (5, 10):
            center = 0.25 * (v[i, j] + v[i + 1, j] + v[i + 1, j + 1] + v[i, j + 1])
            if c == 5:
                pairs = [("w", "n"), ("s", "e")] if center < 0 else [("w", "s"), ("e", "n")]
            else:
                pairs = [("s", "w"), ("n", "e")] if center < 0 else [("s", "e"), ("n", "w")]
        else:
            pairs = _CASES[c]
        edge_map = {
            "s": (0, i, j),
            "n": (0, i, j + 1),
            "w": (1, i, j),
            "e": (1, i + 1, j),
        }
        for e0, e1 in pairs:
            k0 = edge_map[e0]
            k1 = edge_map[e1]
            segments.append((vertex_on(*k0)[0], vertex_on(*k1)[0]))

    return _chain_segments(segments, verts)


def _chain_segments(segments, verts):
    """Join edge-keyed segments into polylines/loops."""
    adj = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seg_lookup = {}
    for seg in segments:
        a, b = seg
        seg_lookup.setdefault(a, []).append(seg)
        seg_lookup.setdefault(b, []).append(seg)

    used = set()

    def take(node):
        for seg in seg_lookup.get(node, ()):
            if seg not in used:
                used.add(seg)
                a, b = seg
                return b if a == node else a
        return None

    polylines = []
    # open paths first (endpoints with odd degree), then closed loops
    endpoints = [k for k, v in adj.items() if len(v) % 2 == 1]
    starts = endpoints + list(adj.keys())
    for start in starts:
        path = [start]
        node = start
        while True:
            nxt = take(node)
            if nxt is None:
                break
            path.append(nxt)
            node = nxt
        if len(path) > 1:
            polylines.append(np.array([verts[k] for k in path]))
    return polylines


def extract_front(u: ScalarField, eta: float) -> FrontSet:
    """Front of the eta-sublevel set of u."""
    if eta < 0:
        raise ValueError(f"front level must be >= 0, got {eta}")
    marked = np.argwhere(u.values <= eta)
    grid = u.grid
    if grid.ndim == 2:
        polylines = _march_squares(u.values, grid, eta)
        return FrontSet(level=eta, marked_nodes=marked, polylines=polylines)
    from skimage.measure import marching_cubes

    vmin, vmax = float(u.values.min()), float(u.values.max())
    if not (vmin < eta < vmax):
        return FrontSet(level=eta, marked_nodes=marked, triangles=(np.zeros((0, 3)), np.zeros((0, 3), int)))
    verts, faces, _, _ = marching_cubes(u.values, level=eta, spacing=grid.spacing)
    verts = verts + np.asarray(grid.origin)
    return FrontSet(level=eta, marked_nodes=marked, triangles=(verts, faces))
