import numpy as np
import pytest

from mcflow.grid import (GeometrySet, ScalarField, box_grid, cap,
                         distance_field, field_min)
from mcflow.ops import cfl_dt, default_params
from mcflow.solver import (DirichletSpec, ObstacleSpec, SolverConfig,
                           comparison_check, evolve_dirichlet, evolve_free,
                           evolve_obstacle, export_trajectory)
from mcflow.analysis import pde_residual


def small_setup(nx=61):
    g = box_grid(nx)
    u0 = cap(distance_field(GeometrySet.circle((0.0, 0.0), 1.0), g), 0.3)
    return g, u0, default_params(g)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(t_max=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(t_max=0.1, probe_every=0)
    with pytest.raises(ValueError):
        SolverConfig(t_max=0.1, reinit_interval=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(t_max=0.1, reinit_mode="sometimes")
    with pytest.raises(ValueError):
        SolverConfig(t_max=0.1, reinit_burnin=-2)


def test_cfl_violation_rejected():
    g, u0, par = small_setup()
    cfg = SolverConfig(t_max=0.01, dt=2.0 * cfl_dt(g, 1.0))
    with pytest.raises(ValueError, match="CFL"):
        evolve_free(u0, par, cfg)


def test_obstacle_clamp_exact():
    g, u0, par = small_setup()
    sigma = GeometrySet.from_points([(1.0, 0.0), (-1.0, 0.0)])
    obs = ObstacleSpec.from_geometry(sigma, g, 0.3)
    cfg = SolverConfig(t_max=0.02)
    traj = evolve_obstacle(field_min(u0, obs.psi_plus), obs, par, cfg)
    assert traj.max_obstacle_violation <= 1e-12
    for snap in traj.snapshots:
        assert np.all(snap.values <= obs.psi_plus.values + 1e-15)
        assert snap.min() >= -1e-15


def test_incompatible_initial_data_rejected():
    g, u0, par = small_setup()
    psi = u0.with_values(np.zeros(g.dims))
    with pytest.raises(ValueError, match="upper obstacle"):
        evolve_obstacle(u0, ObstacleSpec(psi_plus=psi), par,
                        SolverConfig(t_max=0.01))


def test_crossed_obstacles_rejected():
    g, u0, par = small_setup()
    with pytest.raises(ValueError):
        ObstacleSpec(psi_plus=u0.with_values(np.zeros(g.dims)),
                     psi_minus=u0.with_values(np.ones(g.dims)))


def test_free_equals_unbounded_obstacle_bitwise():
    g, u0, par = small_setup()
    cfg = SolverConfig(t_max=0.02, enforce_nonneg=False)
    a = evolve_free(u0, par, cfg)
    b = evolve_obstacle(u0, ObstacleSpec(), par, cfg)
    for sa, sb in zip(a.snapshots, b.snapshots):
        assert np.array_equal(sa.values, sb.values)


def test_determinism_bitwise():
    g, u0, par = small_setup()
    cfg = SolverConfig(t_max=0.02, reinit_interval=g.hmin / 2.0)
    a = evolve_obstacle(u0, ObstacleSpec(delta=0.3), par, cfg)
    b = evolve_obstacle(u0, ObstacleSpec(delta=0.3), par, cfg)
    for sa, sb in zip(a.snapshots, b.snapshots):
        assert np.array_equal(sa.values, sb.values)


def test_snapshot_times_resolved():
    g, u0, par = small_setup()
    cfg = SolverConfig(t_max=0.02, snapshot_every=10 ** 9,
                       snapshot_times=(0.01, 0.02))
    traj = evolve_free(u0, par, cfg)
    assert traj.times[0] == 0.0
    assert abs(traj.times[traj.at_time(0.01)] - 0.01) <= traj.dt
    assert abs(traj.times[-1] - 0.02) <= traj.dt


def test_own_trajectory_residual_is_zero():
    # consecutive unclamped snapshots reproduce the scheme exactly
    g, u0, par = small_setup(nx=41)
    cfg = SolverConfig(t_max=5.5 * cfl_dt(g, 0.25), snapshot_every=1,
                       enforce_nonneg=False)
    traj = evolve_free(u0, par, cfg)
    _, summary = pde_residual(traj, par)
    assert abs(summary["min_residual"]) <= 1e-12
    assert abs(summary["max_residual"]) <= 1e-12


def test_symmetry_preserved():
    g, u0, par = small_setup()
    cfg = SolverConfig(t_max=0.02, reinit_interval=g.hmin / 2.0)
    traj = evolve_obstacle(u0, ObstacleSpec(delta=0.3), par, cfg)
    final = traj.snapshots[-1].values
    assert np.allclose(final, final[::-1, :], atol=1e-9)
    assert np.allclose(final, final[:, ::-1], atol=1e-9)
    assert np.allclose(final, final.T, atol=1e-9)


def test_dirichlet_validation():
    g, u0, par = small_setup()
    mask = np.ones(g.dims, dtype=bool)
    with pytest.raises(ValueError, match="box edge"):
        DirichletSpec(domain_mask=mask, boundary_values=u0)
    mask = np.zeros(g.dims, dtype=bool)
    with pytest.raises(ValueError, match="empty interior"):
        DirichletSpec(domain_mask=mask, boundary_values=u0)


def test_dirichlet_freezes_exterior():
    g, u0, par = small_setup()
    x, y = g.mesh()
    mask = np.hypot(x, y) < 1.2
    spec = DirichletSpec(domain_mask=mask, boundary_values=u0)
    traj = evolve_dirichlet(u0, spec, par, SolverConfig(t_max=0.02))
    final = traj.snapshots[-1].values
    assert np.array_equal(final[~mask], u0.values[~mask])
    assert not np.array_equal(final[mask], u0.values[mask])


def test_dirichlet_mismatched_data_rejected():
    g, u0, par = small_setup()
    x, y = g.mesh()
    mask = np.hypot(x, y) < 1.2
    shifted = u0.with_values(u0.values + 0.01)
    spec = DirichletSpec(domain_mask=mask, boundary_values=u0)
    with pytest.raises(ValueError, match="disagrees"):
        evolve_dirichlet(shifted, spec, par, SolverConfig(t_max=0.01))


def test_comparison_check_orders_fields():
    g, u0, par = small_setup()
    cfg = SolverConfig(t_max=0.02)
    lo = evolve_free(u0, par, cfg)
    hi = evolve_free(u0.with_values(u0.values + 0.1), par, cfg)
    out = comparison_check(lo, hi)
    assert out["max_violation"] <= 1e-12


def test_probes_recorded():
    g, u0, par = small_setup(nx=41)
    idx = np.array([0, 100, 500])
    cfg = SolverConfig(t_max=0.01, probe_nodes=idx, probe_every=5)
    traj = evolve_free(u0, par, cfg)
    assert traj.probe_values.shape[1] == 3
    assert traj.probe_times[0] == 0.0
    assert traj.probe_times[-1] == pytest.approx(traj.times[-1])
    assert np.all(np.diff(traj.probe_times) > 0)


def test_export_trajectory(tmp_path):
    g, u0, par = small_setup(nx=41)
    cfg = SolverConfig(t_max=0.01, snapshot_every=10 ** 9)
    traj = evolve_obstacle(u0, ObstacleSpec(delta=0.3), par, cfg)
    export_trajectory(traj, tmp_path)
    assert (tmp_path / "diagnostics.csv").exists()
    assert (tmp_path / "u_000000.csv").exists()
    head = (tmp_path / "diagnostics.csv").read_text().splitlines()[0]
    assert head.startswith("t,min_u,max_u,obstacle_violation,lipschitz")


def test_reinit_keeps_circle_accuracy():
    # without periodic distance rebuilds the kink at the center stalls the
    # front; with them the radius law holds (checked loosely at low res)
    from mcflow.contour import extract_front
    g, u0, par = small_setup(nx=121)
    h = g.hmin
    cfg = SolverConfig(t_max=0.3, snapshot_every=10 ** 9, snapshot_times=(0.3,),
                       reinit_interval=h / 2.0)
    traj = evolve_obstacle(u0, ObstacleSpec(delta=0.3), par, cfg)
    snap = traj.field_at(0.3)
    f = extract_front(snap, snap.min() + h)
    radius = f.radii().mean() + h
    assert abs(radius - np.sqrt(0.4)) <= 2.0 * h
