"""Command-line front door.

Subcommands: simulate, estimate-cd, figure, verify, experiment. Exit codes
are a stable contract: 0 success, 1 statistical failure, 2 configuration
error, 3 resource cap exceeded. A configuration file is a flat key=value
text file; command-line flags override it, and the HYPERCROSS_SEED
environment variable overrides any configured seed.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ConfigError, HypercrossError, TupleBudgetExceeded
from .experiments import ExperimentSpec, run_experiment
from .figure import render_figure
from .rng import master_rng
from .samplers import (
    SimConfig,
    intersection_process,
    sample_limit_process,
    sample_poisson_hyperplanes,
    sample_zero_cell,
)
from .serialize import (
    dumps_json,
    hyperplane_sample_to_csv,
    hyperplane_sample_to_json_dict,
    point_sample_to_csv,
    point_sample_to_json_dict,
    polytope_to_json_dict,
    write_json,
)

EXIT_OK = 0
EXIT_STATISTICAL = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for line_no, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = {
    "dim": int,
    "intensity": float,
    "radius_exponent": float,
    "rmin": float,
    "reps": int,
    "seed": int,
    "cap": int,
}


def _build_config(args) -> tuple:
    """Merge config file, flags and environment into (SimConfig, cap)."""
    merged = {}
    if getattr(args, "config", None):
        raw = _read_config_file(args.config)
        for key, value in raw.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                merged[key] = _CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    env_seed = os.environ.get("HYPERCROSS_SEED")
    if env_seed is not None:
        try:
            merged["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"HYPERCROSS_SEED must be an integer, got {env_seed!r}") from exc
    cap = merged.pop("cap", 10_000_000)
    config = SimConfig(
        dim=merged.get("dim", 2),
        intensity=merged.get("intensity", 1000.0),
        radius_exponent=merged.get("radius_exponent"),
        r_min=merged.get("rmin", 0.1),
        reps=merged.get("reps", 100),
        master_seed=merged.get("seed", 0),
    )
    return config, cap


def _add_config_flags(parser):
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--dim", type=int, help="ambient dimension (default 2)")
    parser.add_argument("--intensity", type=float, help="process intensity t")
    parser.add_argument(
        "--radius-exponent",
        dest="radius_exponent",
        type=float,
        help="R = t^(-exponent); defaults to d/(d+1)",
    )
    parser.add_argument("--rmin", type=float, help="truncation radius for the limit process")
    parser.add_argument("--reps", type=int, help="replication count")
    parser.add_argument("--seed", type=int, help="master seed (64-bit)")
    parser.add_argument("--cap", type=int, help="d-subset enumeration budget")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hypercross",
        description="Simulation and verification of restricted hyperplane "
        "intersection processes and their power-law limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write one realisation to CSV/JSON")
    _add_config_flags(p_sim)
    p_sim.add_argument(
        "--what",
        choices=("points", "planes", "limit", "zero-cell"),
        default="points",
        help="object to realise (default: intersection points)",
    )
    p_sim.add_argument("--out", required=True, help="output path prefix")

    p_cd = sub.add_parser("estimate-cd", help="Monte Carlo limit constant")
    p_cd.add_argument("--dim", type=int, default=2)
    p_cd.add_argument("--samples", type=int, default=1_000_000)
    p_cd.add_argument("--seed", type=int, default=0)

    p_fig = sub.add_parser("figure", help="render the nested-zoom SVG (d=2)")
    _add_config_flags(p_fig)
    p_fig.add_argument("--out", required=True, help="output SVG path")
    p_fig.add_argument("--zoom", type=float, default=8.0)
    p_fig.add_argument("--panels", type=int, default=4)

    p_ver = sub.add_parser("verify", help="run the acceptance suite")
    p_ver.add_argument("--level", choices=("quick", "full"), default="quick")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--out", default=None, help="directory for reports")

    p_exp = sub.add_parser("experiment", help="run one named experiment")
    _add_config_flags(p_exp)
    p_exp.add_argument("--name", required=True, help="experiment name")
    p_exp.add_argument("--out", default=None, help="directory for reports")
    p_exp.add_argument(
        "--option",
        action="append",
        default=[],
        metavar="KEY=JSONVALUE",
        help="experiment-specific option, may repeat",
    )

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TupleBudgetExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except HypercrossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATISTICAL


def _dispatch(args) -> int:
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "estimate-cd":
        from .constants import estimate_limit_constant

        est = estimate_limit_constant(
            args.dim, args.samples, master_rng(args.seed), args.seed
        )
        print(
            json.dumps(
                {
                    "dim": args.dim,
                    "value": est.value,
                    "stderr": est.stderr,
                    "n": est.n,
                    "seed": args.seed,
                }
            )
        )
        return EXIT_OK
    if args.command == "figure":
        config, _cap = _build_config(args)
        summary = render_figure(config, args.out, zoom=args.zoom, panels=args.panels)
        print(json.dumps(summary))
        return EXIT_OK
    if args.command == "verify":
        from .verify import DEFAULT_VERIFY_SEED, run_verify

        seed = args.seed
        env_seed = os.environ.get("HYPERCROSS_SEED")
        if seed is None:
            seed = int(env_seed) if env_seed is not None else DEFAULT_VERIFY_SEED
        aggregate = run_verify(args.level, seed, args.out)
        return EXIT_OK if aggregate["verdict"] else EXIT_STATISTICAL
    if args.command == "experiment":
        config, cap = _build_config(args)
        options = {"cap": cap}
        for item in args.option:
            if "=" not in item:
                raise ConfigError(f"--option expects KEY=JSONVALUE, got {item!r}")
            key, _, value = item.partition("=")
            try:
                options[key] = json.loads(value)
            except json.JSONDecodeError:
                options[key] = value
        spec = ExperimentSpec(args.name, config, output_dir=args.out, options=options)
        report = run_experiment(spec)
        print(
            f"{report.experiment}: {'PASS' if report.verdict else 'FAIL'} "
            f"({report.wall_time:.1f}s)"
        )
        return EXIT_OK if report.verdict else EXIT_STATISTICAL
    raise ConfigError(f"unknown command {args.command!r}")


def _cmd_simulate(args) -> int:
    config, cap = _build_config(args)
    rng = master_rng(config.master_seed)
    prefix = args.out
    if args.what == "planes":
        sample = sample_poisson_hyperplanes(config.intensity, config.radius, config.dim, rng)
        hyperplane_sample_to_csv(sample, prefix + ".csv")
        write_json(hyperplane_sample_to_json_dict(sample), prefix + ".json")
        print(json.dumps({"planes": len(sample), "radius": sample.radius}))
        return EXIT_OK
    if args.what == "points":
        sample = sample_poisson_hyperplanes(config.intensity, config.radius, config.dim, rng)
        pts = intersection_process(sample, cap)
        pts.meta["seed"] = config.master_seed
        point_sample_to_csv(pts, prefix + ".csv")
        write_json(point_sample_to_json_dict(pts), prefix + ".json")
        print(json.dumps({"planes": len(sample), "points": len(pts), "skipped": sample.skipped_tuples}))
        return EXIT_OK
    if args.what == "limit":
        from .constants import reference_limit_constant

        c_d = reference_limit_constant(config.dim)
        pts = sample_limit_process(config.dim, c_d, config.r_min, rng)
        pts.meta["seed"] = config.master_seed
        point_sample_to_csv(pts, prefix + ".csv")
        write_json(point_sample_to_json_dict(pts), prefix + ".json")
        print(json.dumps({"points": len(pts), "c_d": c_d}))
        return EXIT_OK
    if args.what == "zero-cell":
        from .constants import dual_intensity, reference_limit_constant

        gamma = dual_intensity(config.dim, reference_limit_constant(config.dim))
        cell = sample_zero_cell(config.dim, gamma, rng)
        write_json(polytope_to_json_dict(cell), prefix + ".json")
        print(json.dumps({"fVector": list(cell.f_vector()), "gamma": gamma}))
        return EXIT_OK
    raise ConfigError(f"unknown simulate target {args.what!r}")


if __name__ == "__main__":
    sys.exit(main())
