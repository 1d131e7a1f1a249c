"""Uniform voxelization of the region, ground-truth labels and discretization RPE."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping, NamedTuple

import numpy as np

from .geometry import Point3, Scene, radio_parameter_at

DEFAULT_SUBSAMPLES = 9


class CubeIndex(NamedTuple):
    i: int
    j: int
    k: int


@dataclass(frozen=True)
class GridSpec:
    n: int
    edge: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.edge > 0:
            raise ValueError(f"cube edge must be positive, got {self.edge}")

    @classmethod
    def for_region(cls, region_edge: float, n: int) -> GridSpec:
        return cls(n, region_edge / n)

    @property
    def M(self) -> int:
        return self.n**3

    def check(self, idx) -> CubeIndex:
        idx = CubeIndex(*map(int, idx))
        if not all(0 <= c < self.n for c in idx):
            raise IndexError(f"cube index {tuple(idx)} out of range for n={self.n}")
        return idx


class Provenance(IntEnum):
    UNKNOWN = 0
    MEASURED = 1
    INFERRED = 2


@dataclass
class OccupancyMap:
    """Per-cube labels and provenance, both indexed ``[i, j, k]``."""

    grid: GridSpec
    labels: np.ndarray
    provenance: np.ndarray

    def __post_init__(self):
        shape = (self.grid.n,) * 3
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(shape)
        self.provenance = np.asarray(self.provenance, dtype=np.int8).reshape(shape)

    @classmethod
    def empty(cls, grid: GridSpec) -> OccupancyMap:
        shape = (grid.n,) * 3
        return cls(grid, np.zeros(shape, np.int64), np.full(shape, Provenance.UNKNOWN, np.int8))

    def known(self) -> np.ndarray:
        return self.provenance != Provenance.UNKNOWN


def cube_center(grid: GridSpec, idx, origin) -> Point3:
    i, j, k = grid.check(idx)
    ox, oy, oz = origin
    e = grid.edge
    return Point3(ox + e * (i + 0.5), oy + e * (j + 0.5), oz + e * (k + 0.5))


def _centers(grid: GridSpec, origin) -> np.ndarray:
    """All cube centers, shape ``(n, n, n, 3)``."""
    c = (np.arange(grid.n) + 0.5) * grid.edge
    g = np.stack(np.meshgrid(c, c, c, indexing="ij"), axis=-1)
    return g + np.asarray(origin, dtype=float)


def _lattice_offsets(s: int, edge: float) -> np.ndarray:
    """Stratified ``s**3`` midpoint lattice inside a cube at the origin."""
    u = (np.arange(s) + 0.5) / s * edge
    return np.stack(np.meshgrid(u, u, u, indexing="ij"), axis=-1).reshape(-1, 3)


def cube_volume_fractions(
    scene: Scene, grid: GridSpec, idx, s: int = DEFAULT_SUBSAMPLES
) -> dict[int, float]:
    """Volume fraction of each radio parameter present in a cube."""
    if s < 1:
        raise ValueError("s must be >= 1")
    idx = grid.check(idx)
    corner = np.asarray(scene.region_origin) + grid.edge * np.asarray(idx, dtype=float)
    labels = radio_parameter_at(scene, corner + _lattice_offsets(s, grid.edge))
    values, counts = np.unique(labels, return_counts=True)
    total = counts.sum()
    return {int(v): c / total for v, c in zip(values, counts)}


def ground_truth_label(fractions: Mapping[int, float]) -> int:
    """Argmax parameter; ties go to the smallest value."""
    if not fractions:
        raise ValueError("empty fraction map")
    best = max(fractions.values())
    return min(v for v, f in fractions.items() if f == best)


def cube_rpe(fractions: Mapping[int, float]) -> float:
    if not fractions:
        raise ValueError("empty fraction map")
    return 1.0 - max(fractions.values())


def _straddling(scene: Scene, grid: GridSpec) -> np.ndarray:
    """Mask of cubes that some network surface may cut.

    Cubes outside this mask are pure: for every ball the cube is either fully
    inside (farthest corner within radius) or fully outside (nearest point
    beyond radius).
    """
    n, e = grid.n, grid.edge
    lo = np.asarray(scene.region_origin) + e * np.stack(
        np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"), axis=-1
    )
    hi = lo + e
    mask = np.zeros((n,) * 3, dtype=bool)
    for net in scene.networks:
        c = np.asarray(net.center)
        near = np.clip(c, lo, hi) - c
        far = np.maximum(np.abs(lo - c), np.abs(hi - c))
        dmin2 = np.sum(near**2, axis=-1)
        dmax2 = np.sum(far**2, axis=-1)
        r2 = net.radius**2
        mask |= (dmin2 <= r2) & (dmax2 > r2)
    return mask


@dataclass
class VoxelTruth:
    """Ground-truth labels and per-cube RPE over a whole grid."""

    grid: GridSpec
    labels: np.ndarray
    rpe: np.ndarray

    @property
    def discretization_rpe(self) -> float:
        # fixed C-order summation keeps the result reproducible
        return float(np.sum(self.rpe, dtype=np.float64) / self.grid.M)

    def as_map(self) -> OccupancyMap:
        return OccupancyMap(
            self.grid, self.labels, np.full(self.labels.shape, Provenance.MEASURED, np.int8)
        )


def voxel_truth(
    scene: Scene, grid: GridSpec, s: int = DEFAULT_SUBSAMPLES, chunk: int = 4096
) -> VoxelTruth:
    """Label every cube by volume majority and record its RPE.

    Only cubes a boundary may cut are subsampled; the rest take the parameter
    at their center with zero error.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    origin = np.asarray(scene.region_origin)
    centers = _centers(grid, origin)
    labels = radio_parameter_at(scene, centers.reshape(-1, 3)).reshape((grid.n,) * 3)
    rpe = np.zeros((grid.n,) * 3)
    mixed = np.argwhere(_straddling(scene, grid))
    offsets = _lattice_offsets(s, grid.edge)
    n_par = scene.N
    for start in range(0, len(mixed), chunk):
        block = mixed[start : start + chunk]
        corners = origin + grid.edge * block.astype(float)
        pts = corners[:, None, :] + offsets[None, :, :]
        lab = radio_parameter_at(scene, pts.reshape(-1, 3)).reshape(len(block), -1)
        flat = (np.arange(len(block))[:, None] * n_par + lab).ravel()
        counts = np.bincount(flat, minlength=len(block) * n_par).reshape(len(block), n_par)
        # argmax returns the first maximum, i.e. the smallest parameter on ties
        best = counts.argmax(axis=1)
        i, j, k = block.T
        labels[i, j, k] = best
        rpe[i, j, k] = 1.0 - counts.max(axis=1) / lab.shape[1]
    return VoxelTruth(grid, labels, rpe)


def discretization_rpe(scene: Scene, grid: GridSpec, s: int = DEFAULT_SUBSAMPLES) -> float:
    """Mean per-cube RPE over the grid (uniform cube weights 1/M)."""
    return voxel_truth(scene, grid, s).discretization_rpe


def ground_truth_map(scene: Scene, grid: GridSpec, s: int = DEFAULT_SUBSAMPLES) -> OccupancyMap:
    return voxel_truth(scene, grid, s).as_map()
