"""Grid-based level-set mean curvature flow with prescribed-boundary
obstacle constraints, plus a verification harness for its checkable
properties (exact radius laws, avoidance, Dirichlet consistency,
regularity, fattening)."""

from .analysis import (export_front_csv, export_report_csv, fattening_ratio,
                       front_radius, front_separation, hausdorff,
                       holder_bound_violation, holder_exponent,
                       lipschitz_estimate, pde_residual, residual_of_sequence,
                       set_distance, tube_mean_convexity_check,
                       tubular_curvature)
from .contour import FrontSet, extract_front
from .grid import (GeometrySet, Grid, ScalarField, box_grid, cap,
                   distance_field, field_max, field_min, load_field,
                   make_grid, pointwise_clamp, save_field)
from .ops import OperatorParams, cfl_dt, curvature_rhs, default_params
from .scenarios import (SCENARIOS, ScenarioReport, ScenarioSpec, describe,
                        run_all, run_scenario, scenario_names)
from .solver import (DirichletSpec, ObstacleSpec, SolverConfig, Trajectory,
                     comparison_check, evolve_dirichlet, evolve_free,
                     evolve_obstacle, export_trajectory)

__version__ = "0.1.0"
