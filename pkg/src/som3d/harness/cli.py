"""Command line entry point: ``som3d <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..planner import SomConfig, config_errors, run_som
from ..voxel import GridSpec
from .experiments import default_jobs, run_rpe_sweep, run_som_sweep, run_theorem2
from .io import FORMATS, emit, write_occupancy_map, write_waypoints
from .scenario import Scenario, ScenarioError, constraint_errors, load_scenario

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--scenario",
        default="paper-v",
        help="scenario JSON file, or the name of a bundled scenario (default: paper-v)",
    )
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--seed", type=int, help="run this single seed instead of the scenario's list")
    p.add_argument("--jobs", type=int, help="worker processes (default: $SOM3D_JOBS or 1)")
    return p


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="som3d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("rpe-sweep", parents=[common], help="discretization RPE against prediction")
    p.add_argument("--grids", type=_int_list, help="override the grid sizes, e.g. 9,17,33")

    p = sub.add_parser("som-sweep", parents=[common], help="adaptive survey counts, distance, error")
    p.add_argument("--grids", type=_int_list, help="override the grid sizes")
    p.add_argument("--intervals", type=_int_list, help="override the initial intervals d0")
    p.add_argument("--modes", type=lambda s: s.split(","), help="override position modes")

    p = sub.add_parser("theorem2", parents=[common], help="dimensionless RPE constant")
    p.add_argument("--samples", type=int, help="Monte Carlo draws (default: scenario value)")
    p.add_argument("--no-quadrature", action="store_true", help="skip the quadrature path")

    sub.add_parser("validate", parents=[common], help="check a scenario file and report problems")

    p = sub.add_parser("tour-dump", parents=[common], help="waypoint CSV of one adaptive run")
    p.add_argument("--n", type=int, required=True, help="cubes per axis")
    p.add_argument("--d0", type=int, required=True, help="initial interval")
    p.add_argument("--mode", choices=("center", "random"), default="center")
    p.add_argument("--map-out", help="also write the reconstructed occupancy map here")
    return parser


def _scenario(args) -> Scenario:
    sc = load_scenario(args.scenario)
    updates = {}
    if args.seed is not None:
        updates["seeds"] = (args.seed,)
    for name, attr in (("grids", "grids"), ("intervals", "intervals"), ("modes", "position_modes")):
        value = getattr(args, name, None)
        if value:
            updates[attr] = tuple(value)
    if updates:
        sc = replace(sc, **updates)
        problems = constraint_errors(sc)
        if problems:
            raise ScenarioError(str(args.scenario), problems)
    return sc


def _run(args) -> int:
    sc = _scenario(args)
    if args.command == "validate":
        print(
            f"ok: {sc.id}: T={len(sc.networks)} networks, grids={list(sc.grids)}, "
            f"intervals={list(sc.intervals)}, seeds={len(sc.seeds)}"
        )
        return EXIT_OK
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise ValueError("--jobs must be >= 1")
    if args.command == "rpe-sweep":
        rows = run_rpe_sweep(sc, jobs)
    elif args.command == "som-sweep":
        rows = run_som_sweep(sc, jobs)
    elif args.command == "theorem2":
        samples = args.samples if args.samples is not None else sc.theorem2_draws
        rows = run_theorem2(samples, sc.seeds[0], sc.id, quadrature=not args.no_quadrature)
    else:
        problems = config_errors(args.n, args.d0)
        if problems:
            raise ScenarioError(str(args.scenario), problems)
        grid = GridSpec.for_region(sc.region_edge, args.n)
        config = SomConfig(args.d0, args.mode, sc.seeds[0], sc.aco)
        rec = run_som(sc.scene(), grid, config)
        write_waypoints(rec, sc.region_origin, args.out)
        if args.map_out:
            write_occupancy_map(rec.map, args.map_out)
        return EXIT_OK
    emit(rows, args.out, args.format)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ScenarioError as e:
        print(f"invalid scenario {e.source}:", file=sys.stderr)
        for problem in e.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:  # noqa: BLE001 - any failure past validation is a runtime error
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
