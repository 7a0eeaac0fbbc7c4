"""Acceptance suite: ten checks of the solver's quantitative guarantees.

Each test prints one [PASS]/[FAIL] line. Scenario runs are shared session
fixtures; the full suite takes roughly 10-15 minutes on a laptop-class CPU.
"""
import numpy as np
import pytest

import conftest

from mcflow.analysis import residual_of_sequence
from mcflow.grid import GeometrySet, ScalarField, box_grid, cap, distance_field
from mcflow.ops import OperatorParams, cfl_dt, curvature_rhs, default_params
from mcflow.scenarios import ScenarioSpec, run_scenario


def _check(num, desc, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] criterion {num}: {desc}"
    if detail:
        line += f" ({detail})"
    print(line)
    # also surface the line in the end-of-run summary, where it is visible
    # even with output capture enabled
    conftest.CRITERION_LINES.append(line)
    assert ok, line


def _run(name, tmp, label, **kw):
    spec = ScenarioSpec(name=name, out_dir=str(tmp / label), **kw)
    return run_scenario(spec)


@pytest.fixture(scope="session")
def outdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="session")
def circle_m1(outdir):
    return _run("shrinking_circle", outdir, "circle_m1", resolution=1)


@pytest.fixture(scope="session")
def circle_m2(outdir):
    return _run("shrinking_circle", outdir, "circle_m2", resolution=2)


@pytest.fixture(scope="session")
def pinned_m1(outdir):
    return _run("pinned", outdir, "pinned_m1", resolution=1)


@pytest.fixture(scope="session")
def pinned_m2(outdir):
    return _run("pinned", outdir, "pinned_m2", resolution=2)


@pytest.fixture(scope="session")
def fattening_m1(outdir):
    return _run("fattening", outdir, "fat_m1", resolution=1)


@pytest.fixture(scope="session")
def fattening_m2(outdir):
    return _run("fattening", outdir, "fat_m2", resolution=2)


@pytest.fixture(scope="session")
def fattening_m3(outdir):
    return _run("fattening", outdir, "fat_m3", resolution=3)


@pytest.fixture(scope="session")
def avoidance_m2(outdir):
    return _run("avoidance", outdir, "avoid_m2", resolution=2)


@pytest.fixture(scope="session")
def dirichlet_m2(outdir):
    return _run("dirichlet_consistency", outdir, "dir_m2", resolution=2)


@pytest.fixture(scope="session")
def invariance_m2(outdir):
    return _run("invariance", outdir, "inv_m2", resolution=2)


@pytest.fixture(scope="session")
def regularity_m2(outdir):
    return _run("regularity", outdir, "reg_m2", resolution=2)


H_CIRCLE_M2 = 3.0 / 255.0   # 256 nodes per axis
H_M1 = 0.025                # 121 nodes per axis
H_M2 = 0.0125               # 241 nodes per axis


def test_criterion_1_shrinking_circle(circle_m2):
    err = circle_m2.metrics["max_radius_error"]
    err_free = circle_m2.metrics["max_radius_error_free"]
    ok = (err <= 2.0 * H_CIRCLE_M2 and err_free <= 2.0 * H_CIRCLE_M2
          and circle_m2.runtime_seconds <= 120.0)
    _check(1, "shrinking circle follows sqrt(1-2t) within 2h at 256^2",
           ok, f"err {err:.4f}/{err_free:.4f} <= {2*H_CIRCLE_M2:.4f}, "
               f"{circle_m2.runtime_seconds:.0f}s")


def test_criterion_2_constraints_exact(circle_m2, pinned_m2, fattening_m3,
                                       dirichlet_m2):
    viol = max(r.metrics["obstacle_violation"]
               for r in (circle_m2, pinned_m2, fattening_m3, dirichlet_m2))
    sigma = max(r.metrics["sigma_node_max"]
                for r in (pinned_m2, fattening_m3, dirichlet_m2))
    ok = viol <= 1e-12 and sigma <= 0.0
    _check(2, "obstacle violation <= 1e-12 and exact zeros on boundary nodes",
           ok, f"violation {viol:.2e}, sigma nodes {sigma:.2e}")


def test_criterion_3_lipschitz(circle_m1, circle_m2, pinned_m1, pinned_m2,
                               fattening_m1, fattening_m2):
    pairs = [("circle", circle_m1, circle_m2),
             ("pinned", pinned_m1, pinned_m2),
             ("fattening", fattening_m1, fattening_m2)]
    ok = True
    details = []
    for label, coarse, fine in pairs:
        lc = coarse.metrics["max_lipschitz"]
        lf = fine.metrics["max_lipschitz"]
        exc_c = max(0.0, lc - 1.05)
        exc_f = max(0.0, lf - 1.05)
        ok &= lf <= 1.05 and exc_f <= exc_c + 1e-12
        details.append(f"{label} {lc:.3f}->{lf:.3f}")
    _check(3, "Lipschitz <= 1.05 with non-increasing excess under refinement",
           ok, ", ".join(details))


def test_criterion_4_holder_in_time(regularity_m2):
    excess = regularity_m2.metrics["holder_excess"]
    ok = excess <= 1e-9
    _check(4, "worst front node stays within C t^0.45 with C fitted at t=0.1",
           ok, f"excess {excess:.2e}, measured exponent "
               f"{regularity_m2.metrics['holder_exponent']:.3f}")


def test_criterion_5_avoidance(avoidance_m2):
    m = avoidance_m2.metrics
    ok = (m["distance_drop_while_hypothesis"] <= 2.0 * H_M2
          and m["corrected_bound_deficit"] <= 0.0
          and m["free_separation_error"] <= 3.0 * H_M2)
    detail = (f"drop {m['distance_drop_while_hypothesis']:.4f}, deficit "
              f"{m['corrected_bound_deficit']:.4f}, free err "
              f"{m['free_separation_error']:.4f}")
    if avoidance_m2.status == "hypothesis-failure":
        detail += (f"; separation hypothesis fails at t="
                   f"{m['hypothesis_failed_at']:.2f}, reported as such and "
                   f"checked against the corrected bound")
    _check(5, "fronts avoid each other while the separation hypothesis holds",
           ok, detail)


def test_criterion_6_dirichlet_consistency(dirichlet_m2):
    m = dirichlet_m2.metrics
    ok = (m["max_hausdorff"] <= 3.0 * H_M2
          and m["front_exit_depth"] <= 2.0 * H_M2 + H_M2)
    _check(6, "obstacle and Dirichlet runs agree within 3h on the disk",
           ok, f"hausdorff {m['max_hausdorff']:.4f}, exit depth "
               f"{m['front_exit_depth']:.4f}")


def test_criterion_7_representation_invariance(invariance_m2):
    m = invariance_m2.metrics
    ok = m["initial_hausdorff"] <= H_M2 and m["max_hausdorff"] <= 3.0 * H_M2
    _check(7, "two admissible representations give the same front",
           ok, f"t=0 {m['initial_hausdorff']:.4f} <= {H_M2:.4f}, overall "
               f"{m['max_hausdorff']:.4f} <= {3*H_M2:.4f}")


def test_criterion_8_fattening(fattening_m3):
    h = 3.0 / 360.0
    m = fattening_m3.metrics
    ok = m["ratio_t0.2"] >= 3.0 and m["inner_radius_error"] <= 3.0 * h
    _check(8, "pinned circle fattens (band ratio >= 3) with the correct "
              "inner radius", ok,
           f"ratio {m['ratio_t0.2']:.2f}, inner err {m['inner_radius_error']:.4f}")


def test_criterion_9_operator_refinement():
    errs = []
    for nx in (121, 241, 481):
        g = box_grid(nx)
        x, y = g.mesh()
        u = ScalarField(g, 0.5 * (x ** 2 + y ** 2))
        r = curvature_rhs(u, OperatorParams(eps=g.hmin))
        interior = ((np.hypot(x, y) >= 0.25)
                    & (np.abs(x) <= 1.4) & (np.abs(y) <= 1.4))
        errs.append(np.abs(r.values - 1.0)[interior].max())
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    ok = 3.0 <= r1 <= 5.0 and 3.0 <= r2 <= 5.0
    _check(9, "operator error on the radial quadratic drops ~4x per h halving",
           ok, f"ratios {r1:.2f}, {r2:.2f}")


def test_criterion_10_supersolution_residuals(regularity_m2):
    barrier = regularity_m2.metrics["barrier_min_residual"]
    ok = barrier >= -1e-6
    consts = []
    mins = []
    for nx in (121, 241):
        g = box_grid(nx)
        par = default_params(g)
        dt = cfl_dt(g, 0.25)
        t0 = 0.2

        def w(t):
            circ = GeometrySet.circle((0.0, 0.0), np.sqrt(1.0 - 2.0 * t))
            return cap(distance_field(circ, g), 0.3)

        times = [t0, t0 + dt, t0 + 2.0 * dt]
        _, summary = residual_of_sequence([w(t) for t in times], times, par)
        mins.append(summary["min_residual"])
        consts.append(max(0.0, -summary["min_residual"]) / g.hmin)
        ok &= summary["min_residual"] >= -0.5 * g.hmin
    ok &= consts[1] <= consts[0] + 1e-12
    _check(10, "barrier and exact-law distance fields are discrete "
               "supersolutions off kinks", ok,
           f"barrier {barrier:.3f}, w-field mins {mins[0]:.3f}, {mins[1]:.3f}")
