"""Quantitative estimators: set distances, regularity estimates, fattening
measure, discrete residuals and tubular-curvature formulas."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .contour import FrontSet
from .grid import GeometrySet, ScalarField
from .ops import OperatorParams, curvature_rhs_values, gradient_magnitude

__all__ = [
    "hausdorff",
    "set_distance",
    "front_separation",
    "front_radius",
    "export_front_csv",
    "export_report_csv",
    "lipschitz_estimate",
    "holder_exponent",
    "holder_bound_violation",
    "fattening_ratio",
    "pde_residual",
    "residual_of_sequence",
    "tubular_curvature",
    "tube_mean_convexity_check",
]


def _vertices(obj, step=None):
    if isinstance(obj, FrontSet):
        v = obj.vertices
    elif isinstance(obj, GeometrySet):
        v = obj.sample(step if step is not None else 1e-2)
    else:
        v = np.atleast_2d(np.asarray(obj, dtype=float))
    if len(v) == 0:
        raise ValueError("empty front/point set (possible extinction)")
    return v


def hausdorff(a, b, sample_step=None):
    """Symmetric Hausdorff distance between two fronts / point sets."""
    va = _vertices(a, sample_step)
    vb = _vertices(b, sample_step)
    d_ab = cKDTree(vb).query(va)[0].max()
    d_ba = cKDTree(va).query(vb)[0].max()
    return float(max(d_ab, d_ba))


def set_distance(a, b, sample_step=None):
    """min-min distance between two fronts / point sets."""
    va = _vertices(a, sample_step)
    vb = _vertices(b, sample_step)
    return float(cKDTree(vb).query(va)[0].min())


def front_separation(a: FrontSet, b: FrontSet, offset_a=None, offset_b=None):
    """Distance between the underlying zero sets of two unit-slope fields.

    Each contour sits roughly one offset outside its zero set, so the raw set
    distance underestimates by the sum of the offsets; the offsets default to
    the extraction levels.
    """
    if offset_a is None:
        offset_a = a.level
    if offset_b is None:
        offset_b = b.level
    return set_distance(a, b) + offset_a + offset_b


def front_radius(front: FrontSet, offset=0.0, center=None, reduce="mean"):
    """Radius statistic of a front about a center, plus an outward offset.

    The offset compensates for the extraction level: the level-L contour of a
    unit-slope field sits L outside the underlying zero set.
    """
    r = front.radii(center)
    if len(r) == 0:
        raise ValueError("empty front (possible extinction)")
    stat = {"mean": np.mean, "min": np.min, "max": np.max}[reduce]
    return float(stat(r)) + offset


def export_front_csv(front: FrontSet, path):
    """Contour vertices as `x,y[,z],polyline_id` rows."""
    ndim = 3 if front.triangles is not None else 2
    header = ("x,y,polyline_id" if ndim == 2 else "x,y,z,polyline_id")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        if ndim == 3:
            for v in front.triangles[0]:
                fh.write(f"{v[0]:.17g},{v[1]:.17g},{v[2]:.17g},0\n")
            return
        for pid, poly in enumerate(front.polylines):
            for v in poly:
                fh.write(f"{v[0]:.17g},{v[1]:.17g},{pid}\n")


def export_report_csv(rows, path):
    """Flat `key,value` CSV report."""
    with open(path, "w") as fh:
        fh.write("key,value\n")
        for key, value in rows:
            if isinstance(value, float):
                value = f"{value:.17g}"
            fh.write(f"{key},{value}\n")


def lipschitz_estimate(u: ScalarField) -> float:
    """Max forward-difference slope over all axes."""
    out = 0.0
    for k in range(u.grid.ndim):
        d = np.abs(np.diff(u.values, axis=k)).max() / u.grid.spacing[k]
        out = max(out, float(d))
    return out


def holder_exponent(times, values, fit_range=None):
    """Least-squares slope of log|u(t) - u(0)| against log t.

    Returns +inf for a (numerically) constant series.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    y = np.abs(v - v[0])
    keep = t > 0
    if fit_range is not None:
        keep &= (t >= fit_range[0]) & (t <= fit_range[1])
    keep &= y > 1e-15
    if keep.sum() < 2:
        return float("inf")
    slope = np.polyfit(np.log(t[keep]), np.log(y[keep]), 1)[0]
    return float(slope)


def holder_bound_violation(times, values, t_fit, exponent=0.45):
    """Worst excess of |u(t)-u(0)| over C t^exponent, with C fitted once at t_fit."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    i_fit = int(np.argmin(np.abs(t - t_fit)))
    c = abs(v[i_fit] - v[0]) / (t[i_fit] ** exponent)
    keep = (t > 0) & (t <= t[i_fit])
    excess = np.abs(v[keep] - v[0]) - c * t[keep] ** exponent
    return float(excess.max(initial=0.0))


def fattening_ratio(u: ScalarField, eta: float, ref_length: float) -> float:
    """Marked-band area over the area of an ideal thin band 2*eta*ref_length.

    ~1 for a regular front, >> 1 once the sublevel set has interior.
    """
    if ref_length <= 0:
        raise ValueError("reference front length must be > 0")
    area = float(np.count_nonzero(u.values <= eta)) * u.grid.cell_volume
    return area / (2.0 * eta * ref_length)


def _kink_mask(values, grid, eps, kappa_max=None):
    """Nodes whose stencils are polluted by a slope discontinuity.

    A kink node has either an unresolved gradient or a second difference far
    above any curvature the field can carry; one ring of neighbors is excluded
    with it, since their stencils straddle the same crease.
    """
    from scipy.ndimage import binary_dilation

    if kappa_max is None:
        kappa_max = 1.0 / np.sqrt(grid.hmin)
    gm = gradient_magnitude(values, grid)
    kink = gm < eps
    p = np.pad(values, 1, mode="edge")
    center = p[tuple(slice(1, -1) for _ in range(grid.ndim))]
    for k in range(grid.ndim):
        sl_p = [slice(1, -1)] * grid.ndim
        sl_m = [slice(1, -1)] * grid.ndim
        sl_p[k] = slice(2, None)
        sl_m[k] = slice(None, -2)
        sd = np.abs(p[tuple(sl_p)] - 2.0 * center + p[tuple(sl_m)]) / grid.spacing[k] ** 2
        kink |= sd > kappa_max
    return binary_dilation(kink, structure=np.ones((3,) * grid.ndim, dtype=bool))


def residual_of_sequence(fields, times, params: OperatorParams):
    """Discrete residual r_k = (u_{k+1} - u_k)/dt - R(u_k) for a field sequence.

    Returns residual fields plus a summary restricted to off-kink nodes
    (resolved gradient, bounded second differences), mirroring where the
    continuum inequalities hold.
    """
    times = np.asarray(times, dtype=float)
    residuals = []
    inc_min = np.inf
    inc_max = -np.inf
    n_excluded = 0
    for k in range(len(fields) - 1):
        u0 = fields[k]
        u1 = fields[k + 1]
        dt = times[k + 1] - times[k]
        r = (u1.values - u0.values) / dt - curvature_rhs_values(u0.values, u0.grid, params)
        residuals.append(u0.with_values(r))
        keep = ~_kink_mask(u0.values, u0.grid, params.eps)
        n_excluded += int((~keep).sum())
        if keep.any():
            inc_min = min(inc_min, float(r[keep].min()))
            inc_max = max(inc_max, float(r[keep].max()))
    return residuals, {"min_residual": inc_min, "max_residual": inc_max,
                       "excluded_nodes": n_excluded}


def pde_residual(traj, params: OperatorParams):
    """Residual of a trajectory's own snapshots (exact zero when consecutive
    snapshots are adjacent unclamped steps)."""
    return residual_of_sequence(traj.snapshots, traj.times, params)


def tubular_curvature(kappa, d, convention="offset"):
    """Principal curvature of an offset surface.

    convention "offset": kappa / (1 + d*kappa) for offsets pushed away from
    the curvature direction; "tube": kappa / (1 - d*kappa) for the boundary of
    a distance-d tube.
    """
    if convention == "offset":
        denom = 1.0 + d * kappa
    elif convention == "tube":
        denom = 1.0 - d * kappa
    else:
        raise ValueError(f"unknown convention {convention!r}")
    if abs(denom) < 1e-9:
        raise ValueError(f"focal point reached (denominator {denom:g})")
    return kappa / denom


def tube_mean_convexity_check(sigma, delta, ambient_dim, codim=None):
    """Lower bound on the mean curvature of the distance-delta tube boundary.

    For a codimension-k set with tangential principal curvatures kappa_i,
    H >= (k-1)/delta - sup sum_i kappa_i/(1 - delta*kappa_i).
    Positive bound means the tube is strictly mean-convex.
    """
    kappa_samples = _tangential_curvatures(sigma, ambient_dim)
    k = codim if codim is not None else ambient_dim - _intrinsic_dim(sigma)
    if k < 2:
        raise ValueError(f"codimension must be >= 2, got {k}")
    worst = 0.0
    for kappas in kappa_samples:
        for kap in kappas:
            if kap > 0 and delta >= 1.0 / kap:
                raise ValueError(f"delta={delta:g} exceeds focal threshold 1/{kap:g}")
        worst = max(worst, sum(tubular_curvature(kap, delta, "tube") for kap in kappas))
    bound = (k - 1) / delta - worst
    return {"min_mean_curvature": bound, "strictly_mean_convex": bound > 0,
            "codimension": k, "delta": delta}


def _intrinsic_dim(sigma):
    if sigma.kind == "point-cloud":
        return 0
    return 1


def _tangential_curvatures(sigma, ambient_dim):
    """Principal curvatures in tangential directions for supported primitives."""
    if sigma.kind == "point-cloud":
        return [[]]
    if sigma.kind == "analytic-circle":
        if ambient_dim < 3:
            raise ValueError("a circle has codimension >= 2 only in 3D or higher")
        # tangent direction curves with the circle; both signs occur along it
        return [[1.0 / sigma.radius], [-1.0 / sigma.radius]]
    if sigma.kind in ("analytic-segment", "polyline-set"):
        return [[0.0]]
    raise ValueError(f"no curvature data for geometry kind {sigma.kind!r}")
