"""Adaptive interval-halving survey of the voxel grid, and the exhaustive baseline.

Round 1 measures the cubes on a lattice of spacing ``d0``. After each round,
every lattice cell whose 8 corners carry the same label has its unlabeled
cubes filled with that label; every other cell schedules its half-spacing
sub-lattice for the next round. Spacing halves until it reaches 1, so a run
has ``log2(d0) + 1`` rounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .aco import AcoParams, Tour, WaypointSet, plan_tour
from .geometry import Point3, Scene, radio_parameter_at
from .voxel import CubeIndex, GridSpec, OccupancyMap, Provenance, cube_center

CENTER = "center"
RANDOM = "random"
POSITION_MODES = (CENTER, RANDOM)


def is_power_of_two(d: int) -> bool:
    return d >= 1 and d & (d - 1) == 0


def config_errors(n: int, d0: int) -> list[str]:
    """Reasons a grid of ``n`` cubes per axis cannot be surveyed with interval ``d0``."""
    errs = []
    if not is_power_of_two(d0):
        errs.append(f"interval d0={d0} is not a power of two")
    if n < 1:
        errs.append(f"grid n={n} must be >= 1")
    elif d0 >= 1 and (n - 1) % d0:
        errs.append(f"(n - 1) = {n - 1} is not divisible by d0={d0}")
    return errs


@dataclass(frozen=True)
class SomConfig:
    d0: int
    position_mode: str = CENTER
    rng_seed: int = 0
    aco: AcoParams = field(default_factory=AcoParams)
    plan_tours: bool = True

    def __post_init__(self):
        if not is_power_of_two(self.d0):
            raise ValueError(f"d0={self.d0} is not a power of two")
        if self.position_mode not in POSITION_MODES:
            raise ValueError(f"position_mode must be one of {POSITION_MODES}")

    def validate(self, grid: GridSpec) -> None:
        errs = config_errors(grid.n, self.d0)
        if errs:
            raise ValueError("; ".join(errs))


@dataclass
class MeasurementRound:
    r: int
    d: int
    waypoints: list[CubeIndex]
    results: dict[CubeIndex, int] = field(default_factory=dict)
    tour: Tour | None = None

    @property
    def tour_length(self) -> float:
        return self.tour.length if self.tour is not None else 0.0


@dataclass
class Reconstruction:
    map: OccupancyMap
    rounds: list[MeasurementRound]

    @property
    def total_measurements(self) -> int:
        return sum(len(r.waypoints) for r in self.rounds)

    @property
    def flight_distance(self) -> float:
        return sum(r.tour_length for r in self.rounds)

    def log(self) -> list[dict]:
        """Per-round measurement log with cumulative counts and distances."""
        out, count, dist = [], 0, 0.0
        for rnd in self.rounds:
            count += len(rnd.waypoints)
            dist += rnd.tour_length
            out.append(
                {
                    "round": rnd.r,
                    "interval": rnd.d,
                    "measurements": len(rnd.waypoints),
                    "tour_length": rnd.tour_length,
                    "cumulative_measurements": count,
                    "cumulative_distance": dist,
                }
            )
        return out


def initial_lattice(grid: GridSpec, d: int) -> list[CubeIndex]:
    """Cubes whose indices are all multiples of ``d``, in lexicographic order."""
    if d < 1 or (grid.n - 1) % d:
        raise ValueError(f"(n - 1) = {grid.n - 1} is not divisible by d={d}")
    ax = range(0, grid.n, d)
    return [CubeIndex(i, j, k) for i, j, k in itertools.product(ax, ax, ax)]


def measurement_point(scene: Scene, grid: GridSpec, idx, position_mode: str, seed: int) -> Point3:
    idx = grid.check(idx)
    if position_mode == CENTER:
        return cube_center(grid, idx, scene.region_origin)
    if position_mode != RANDOM:
        raise ValueError(f"unknown position mode {position_mode!r}")
    # one substream per (seed, cube): independent of measurement order
    u = np.random.default_rng([seed, *idx]).random(3)
    lo = np.asarray(scene.region_origin) + grid.edge * np.asarray(idx, dtype=float)
    return Point3(*(lo + grid.edge * u))


def measure(scene: Scene, grid: GridSpec, idx, position_mode: str = CENTER, seed: int = 0) -> int:
    """Noiseless radio parameter observed when measuring cube ``idx`` once."""
    return radio_parameter_at(scene, measurement_point(scene, grid, idx, position_mode, seed))


def _box_counts(mask: np.ndarray, d: int) -> np.ndarray:
    """Number of set cubes in every closed side-``d`` lattice cell, indexed by cell."""
    c = np.zeros(tuple(s + 1 for s in mask.shape), dtype=np.int64)
    c[1:, 1:, 1:] = mask.cumsum(0).cumsum(1).cumsum(2)
    lo = np.arange(0, mask.shape[0] - 1, d)
    hi = lo + d + 1
    total = 0
    for a, b, e in itertools.product((0, 1), repeat=3):
        sign = (-1) ** (3 - a - b - e)
        total = total + sign * c[np.ix_((lo, hi)[a], (lo, hi)[b], (lo, hi)[e])]
    return total


def lattice_cells(known: OccupancyMap, d: int) -> np.ndarray:
    """Lower corners of the side-``d`` lattice cells that still hold unlabeled cubes."""
    unknown = known.provenance == Provenance.UNKNOWN
    if known.grid.n < 2:
        return np.empty((0, 3), dtype=np.intp)
    return np.argwhere(_box_counts(unknown, d) > 0) * d


def refine(rnd: MeasurementRound, known: Reconstruction | OccupancyMap, grid: GridSpec | None = None):
    """Fill agreeing cells and return the next round's waypoints, sorted.

    The cells examined are the side-``rnd.d`` lattice cells that still contain
    unlabeled cubes; their 8 corners have been measured by this or an earlier
    round. A cell whose corners agree has its unlabeled cubes inferred with the
    common label. A disagreeing cell schedules the unlabeled points of its
    half-interval sub-lattice (face centers, edge midpoints, body center).
    Scheduled cubes are never inferred, so nothing is labeled twice.
    """
    m = known.map if isinstance(known, Reconstruction) else known
    if grid is not None and grid != m.grid:
        raise ValueError("round grid does not match the map")
    d = rnd.d
    if d == 1:
        return []
    labels, prov = m.labels, m.provenance
    half = d // 2
    agree, split = [], []
    for i, j, k in lattice_cells(m, d):
        corner = labels[i : i + d + 1 : d, j : j + d + 1 : d, k : k + d + 1 : d]
        if np.any(prov[i : i + d + 1 : d, j : j + d + 1 : d, k : k + d + 1 : d] != Provenance.MEASURED):
            raise RuntimeError(f"cell at {(i, j, k)} has unmeasured corners")
        (agree if np.all(corner == corner.flat[0]) else split).append((i, j, k))
    pending = set()
    for i, j, k in split:
        for a, b, c in itertools.product((0, half, d), repeat=3):
            p = (i + a, j + b, k + c)
            if prov[p] == Provenance.UNKNOWN:
                pending.add(p)
    scheduled = np.zeros(labels.shape, dtype=bool)
    if pending:
        scheduled[tuple(np.array(sorted(pending)).T)] = True
    for i, j, k in agree:
        box = (slice(i, i + d + 1), slice(j, j + d + 1), slice(k, k + d + 1))
        fill = (prov[box] == Provenance.UNKNOWN) & ~scheduled[box]
        labels[box][fill] = labels[i, j, k]
        prov[box][fill] = Provenance.INFERRED
    return sorted(CubeIndex(*p) for p in pending)


def run_som(scene: Scene, grid: GridSpec, config: SomConfig) -> Reconstruction:
    """Survey the grid adaptively; every cube ends up measured or inferred.

    Rounds continue while some cube is unlabeled, at most ``log2(d0) + 1`` of
    them. Each round's waypoints are toured by ant colony optimization, starting at
    the region origin for round 1 and at the previous round's last waypoint
    afterwards. With ``d0 == 1`` the single round follows the snake traversal.
    """
    config.validate(grid)
    known = OccupancyMap.empty(grid)
    rounds: list[MeasurementRound] = []
    pos = tuple(scene.region_origin)
    d = config.d0
    waypoints = initial_lattice(grid, d)
    r = 1
    while True:
        if d == 1 and r == 1:
            waypoints = snake_traversal(grid)
        rnd = MeasurementRound(r, d, waypoints)
        for idx in waypoints:
            rnd.results[idx] = measure(scene, grid, idx, config.position_mode, config.rng_seed)
            known.labels[idx] = rnd.results[idx]
            known.provenance[idx] = Provenance.MEASURED
        if waypoints and config.plan_tours:
            rnd.tour = _route(scene, grid, waypoints, pos, config, r)
            pos = rnd.tour.end
        rounds.append(rnd)
        if d == 1:
            break
        waypoints = refine(rnd, known)
        if not waypoints and known.known().all():
            break
        d //= 2
        r += 1
    leftover = np.argwhere(known.provenance == Provenance.UNKNOWN)
    if len(leftover):
        # cannot happen with a valid config; kept so the map is always complete
        rnd = rounds[-1]
        for idx in map(CubeIndex, *leftover.T):
            val = measure(scene, grid, idx, config.position_mode, config.rng_seed)
            rnd.waypoints.append(idx)
            rnd.results[idx] = val
            known.labels[idx] = val
            known.provenance[idx] = Provenance.MEASURED
    return Reconstruction(known, rounds)


def _route(scene, grid, waypoints, start, config: SomConfig, r: int) -> Tour:
    pts = np.array([cube_center(grid, w, scene.region_origin) for w in waypoints])
    ws = WaypointSet(pts, start)
    if config.d0 == 1:
        # snake order is already an optimal unit-step path
        return Tour(tuple(range(len(pts))), _path_length(start, pts), ws.start, tuple(pts[-1]))
    params = AcoParams(**{**config.aco.__dict__, "seed": _round_seed(config, r)})
    return plan_tour(ws, params)


def _round_seed(config: SomConfig, r: int) -> int:
    return int(np.random.SeedSequence([config.rng_seed, config.aco.seed, r]).generate_state(1)[0])


def _path_length(start, pts: np.ndarray) -> float:
    path = np.vstack([np.asarray(start, dtype=float)[None], pts])
    return float(np.sqrt((np.diff(path, axis=0) ** 2).sum(-1)).sum())


def snake_traversal(grid: GridSpec) -> list[CubeIndex]:
    """Boustrophedon visit of every cube: x fastest, then y, then z, reversing direction each row."""
    n = grid.n
    out = []
    for k in range(n):
        ys = range(n) if k % 2 == 0 else range(n - 1, -1, -1)
        for row, j in enumerate(ys):
            forward = (k * n + row) % 2 == 0
            xs = range(n) if forward else range(n - 1, -1, -1)
            out.extend(CubeIndex(i, j, k) for i in xs)
    return out


def snake_length(grid: GridSpec, start=None, origin=(0.0, 0.0, 0.0)) -> float:
    """Path length of the snake traversal between cube centers, plus the leg from ``start``."""
    length = (grid.M - 1) * grid.edge
    if start is not None:
        first = cube_center(grid, (0, 0, 0), origin)
        length += math.dist(start, first)
    return length


@dataclass(frozen=True)
class MeasurementBound:
    """Upper bounds on the adaptive survey's measurement count.

    ``asymptotic`` uses ``M / d**3`` for round 1, ``lattice`` the exact
    round-1 lattice size. ``literal`` keeps ``(eps * L)**2`` in the boundary
    term's denominator as originally printed; that form is not dimensionless
    and is reported only for comparison.
    """

    asymptotic: float
    lattice: float
    literal: float


def theorem3_bound(M: float, d: int, S: float, eps: float, L: float) -> MeasurementBound:
    """Bound on the number of measurements with initial interval ``d``.

    Later rounds add at most ``2 sqrt(3) S / (3 L**2) * (1 - 1/d**2) * M**(2/3)``
    cubes near the boundary surfaces: ``(S / L**2) * M**(2/3)`` is the
    boundary area in cube faces.
    """
    if M <= 0 or d < 1 or S < 0 or eps <= 0 or L <= 0:
        raise ValueError("M, eps, L must be positive, S non-negative and d >= 1")
    shape = 2 * math.sqrt(3) / 3 * (1 - 1 / d**2) * M ** (2 / 3)
    boundary = shape * S / L**2
    n = round(M ** (1 / 3))
    first = M / d**3
    lattice = ((n - 1) // d + 1) ** 3 if n**3 == round(M) and (n - 1) % d == 0 else first
    return MeasurementBound(first + boundary, lattice + boundary, first + shape * S / (eps * L) ** 2)


def reconstruction_error(rec: Reconstruction | OccupancyMap, truth: OccupancyMap) -> float:
    """Fraction of cubes whose reconstructed label differs from the ground truth."""
    m = rec.map if isinstance(rec, Reconstruction) else rec
    if m.grid != truth.grid:
        raise ValueError("reconstruction and truth use different grids")
    return float(np.count_nonzero(m.labels != truth.labels) / truth.grid.M)
