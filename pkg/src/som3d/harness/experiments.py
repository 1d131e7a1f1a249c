"""Experiment runners that turn a scenario into result rows."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Callable, Iterable

from ..geometry import surface_area_estimate
from ..oracles import sample_theorem2
from ..planecut import predicted_rpe, theorem2_constant
from ..planner import SomConfig, reconstruction_error, run_som, theorem3_bound
from ..voxel import GridSpec, voxel_truth
from .io import ResultRow, sort_rows
from .scenario import Scenario

JOBS_ENV = "SOM3D_JOBS"


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        jobs = int(raw)
    except ValueError:
        raise ValueError(f"{JOBS_ENV}={raw!r} is not an integer") from None
    if jobs < 1:
        raise ValueError(f"{JOBS_ENV} must be >= 1")
    return jobs


def _map(fn: Callable, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def _flatten(parts: Iterable[list[ResultRow]]) -> list[ResultRow]:
    return sort_rows(r for part in parts for r in part)


def surface_area(sc: Scenario) -> float:
    """Boundary area estimate used for predictions and bounds; seeded by the first scenario seed."""
    if not sc.networks:
        return 0.0
    return surface_area_estimate(sc.scene(), sc.surface_samples, sc.seeds[0]).value


def _rpe_cell(task) -> list[ResultRow]:
    sc, n, S = task
    grid = GridSpec.for_region(sc.region_edge, n)
    rpe = voxel_truth(sc.scene(), grid, sc.subsamples).discretization_rpe
    pred = predicted_rpe(S, sc.region_edge, grid.M)
    return [
        ResultRow.make("rpe-sweep", sc.id, "rpe", rpe, n=n),
        ResultRow.make("rpe-sweep", sc.id, "predicted_rpe", pred, n=n, seed=sc.seeds[0]),
    ]


def run_rpe_sweep(sc: Scenario, jobs: int = 1) -> list[ResultRow]:
    """Discretization RPE and its predicted value for every grid of the scenario."""
    S = surface_area(sc)
    return _flatten(_map(_rpe_cell, [(sc, n, S) for n in sc.grids], jobs))


@lru_cache(maxsize=8)
def _truth(sc: Scenario, n: int):
    return voxel_truth(sc.scene(), GridSpec.for_region(sc.region_edge, n), sc.subsamples).as_map()


def _som_cell(task) -> list[ResultRow]:
    sc, n, d0, seed, mode, S = task
    grid = GridSpec.for_region(sc.region_edge, n)
    rec = run_som(sc.scene(), grid, SomConfig(d0, mode, seed, sc.aco))
    bound = theorem3_bound(grid.M, d0, S, grid.edge, sc.region_edge)
    exp = f"som-{mode}"
    values = {
        "measurements": rec.total_measurements,
        "bound": bound.lattice,
        "bound_asymptotic": bound.asymptotic,
        "flight_distance": rec.flight_distance,
        "recon_error": reconstruction_error(rec, _truth(sc, n)),
    }
    return [ResultRow.make(exp, sc.id, k, v, n=n, d0=d0, seed=seed) for k, v in values.items()]


def som_tasks(sc: Scenario, S: float) -> list[tuple]:
    return [
        (sc, n, d0, seed, mode, S)
        for n in sc.grids
        for d0 in sc.intervals
        for seed in sc.seeds
        for mode in sc.position_modes
    ]


def run_som_sweep(sc: Scenario, jobs: int = 1) -> list[ResultRow]:
    """Adaptive survey metrics for every (n, d0, seed, position mode) cell."""
    S = surface_area(sc)
    return _flatten(_map(_som_cell, som_tasks(sc, S), jobs))


def run_theorem2(
    samples: int = 10**6, seed: int = 0, scenario_id: str = "-", quadrature: bool = True
) -> list[ResultRow]:
    """The dimensionless RPE constant by sampling and, optionally, by quadrature."""
    if samples < 10**5:
        raise ValueError("theorem2 sampling needs at least 1e5 draws")
    est = sample_theorem2(samples, seed)
    rows = [
        ResultRow.make("theorem2-mc", scenario_id, "theorem2_Q", est.value, seed=seed),
        ResultRow.make("theorem2-mc", scenario_id, "theorem2_Q_stderr", est.stderr, seed=seed),
    ]
    if quadrature:
        rows.append(ResultRow.make("theorem2-quad", scenario_id, "theorem2_Q", theorem2_constant()))
    return sort_rows(rows)
