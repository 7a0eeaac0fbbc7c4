"""Command-line entry point.

Subcommands: list, describe, run, run-all. Exit code 0 when every executed
scenario passes, 1 on a scenario failure, 2 on usage or configuration errors.
Flag values override config-file values, which override scenario defaults.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .scenarios import ScenarioSpec, describe, run_scenario, scenario_names

__all__ = ["RunConfig", "parse_config", "main"]


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated key=value configuration for one run."""

    scenario: str | None = None
    nx: int | None = None
    resolution: int | None = None
    t_max: float | None = None
    dt: float | None = None
    delta: float | None = None
    eta: float | None = None
    eps: float | None = None
    safety: float | None = None
    out: str | None = None
    ndim: int | None = None
    vtk: bool | None = None


_CONFIG_TYPES = {
    "scenario": str,
    "nx": int,
    "resolution": int,
    "t_max": float,
    "dt": float,
    "delta": float,
    "eta": float,
    "eps": float,
    "safety": float,
    "out": str,
    "ndim": int,
    "vtk": bool,
}


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(path) -> RunConfig:
    """Read `key=value` lines; `#` starts a comment; unknown and duplicate
    keys are rejected with their line number."""
    cfg = RunConfig()
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in seen:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            seen.add(key)
            caster = _parse_bool if _CONFIG_TYPES[key] is bool else _CONFIG_TYPES[key]
            try:
                parsed = caster(value)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: cannot parse {key}={value!r} as "
                    f"{_CONFIG_TYPES[key].__name__}")
            setattr(cfg, key, parsed)
    return cfg


def _merge_spec(name, config: RunConfig, args) -> ScenarioSpec:
    """Flags > config file > scenario defaults."""
    def pick(flag_value, config_value):
        if flag_value is not None:
            return flag_value
        return config_value

    kwargs = {}
    pairs = [
        ("resolution", pick(args.resolution, config.resolution)),
        ("nx", pick(args.nx, config.nx)),
        ("t_max", pick(args.tmax, config.t_max)),
        ("dt", pick(args.dt, config.dt)),
        ("eta", pick(args.eta, config.eta)),
        ("eps", pick(args.eps, config.eps)),
        ("ndim", pick(args.ndim, config.ndim)),
    ]
    for key, value in pairs:
        if value is not None:
            kwargs[key] = value
    delta = pick(args.delta, config.delta)
    if delta is not None:
        kwargs["delta"] = delta
    safety = pick(args.safety, config.safety)
    if safety is not None:
        kwargs["safety"] = safety
    out = pick(args.out, config.out)
    if out is not None:
        kwargs["out_dir"] = out
    vtk = pick(args.vtk or None, config.vtk)
    if vtk:
        kwargs["vtk"] = True
    return ScenarioSpec(name=name, **kwargs)


def _print_registry(out=None):
    for name in scenario_names():
        print(name, file=out if out is not None else sys.stdout)


def _add_run_flags(p):
    p.add_argument("--nx", type=int, help="grid nodes per axis")
    p.add_argument("--resolution", type=int, help="resolution multiplier")
    p.add_argument("--tmax", type=float, help="final time")
    p.add_argument("--dt", type=float, help="time step override")
    p.add_argument("--delta", type=float, help="distance cap")
    p.add_argument("--eta", type=float, help="front threshold")
    p.add_argument("--eps", type=float, help="operator regularization")
    p.add_argument("--safety", type=float, help="CFL safety factor")
    p.add_argument("--ndim", type=int, choices=(2, 3), help="space dimension")
    p.add_argument("--out", help="output directory")
    p.add_argument("--vtk", action="store_true",
                   help="also write legacy ASCII VTK files for 3D snapshots")
    p.add_argument("--config", help="key=value config file")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mcflow",
        description="Level-set mean curvature flow with prescribed-boundary "
                    "obstacle constraints: scenario runner.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print the scenario registry")
    p_desc = sub.add_parser("describe", help="print a scenario's purpose, the "
                                             "claim it tests and its pass criteria")
    p_desc.add_argument("name")
    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("name")
    _add_run_flags(p_run)
    p_all = sub.add_parser("run-all", help="run every registered scenario")
    _add_run_flags(p_all)
    return parser


def _execute(name, args) -> int:
    config = RunConfig()
    if args.config is not None:
        config = parse_config(args.config)
    spec = _merge_spec(name, config, args)
    report = run_scenario(spec)
    print(f"{report.name}: {report.status}"
          f" ({report.runtime_seconds:.1f}s)")
    for key in sorted(report.metrics):
        line = f"  {key} = {report.metrics[key]:.6g}"
        if key in report.tolerances:
            kind, bound = report.tolerances[key]
            op = "<=" if kind == "max" else ">="
            line += f"  [{op} {bound:.6g}]"
        print(line)
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            _print_registry()
            return 0
        if args.command == "describe":
            if args.name not in scenario_names():
                print(f"unknown scenario {args.name!r}; available:", file=sys.stderr)
                _print_registry(sys.stderr)
                return 2
            summary, claim, criteria = describe(args.name)
            print(f"{args.name}\n  setup: {summary}\n  claim: {claim}"
                  f"\n  pass criteria: {criteria}")
            return 0
        if args.command == "run":
            if args.name not in scenario_names():
                print(f"unknown scenario {args.name!r}; available:", file=sys.stderr)
                _print_registry(sys.stderr)
                return 2
            return _execute(args.name, args)
        if args.command == "run-all":
            worst = 0
            for name in scenario_names():
                code = _execute(name, args)
                worst = max(worst, code)
            return worst
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
