"""Region, licensed networks and the per-point radio parameter.

A licensed network covers a closed ball. The radio parameter at a point is
the bitmask of networks whose coverage contains it: bit ``k - 1`` is set when
network ``k`` is detected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


class Point3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class LicensedNetwork:
    id: int
    center: Point3
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"network {self.id}: radius must be positive, got {self.radius}")
        if not all(math.isfinite(c) for c in self.center):
            raise ValueError(f"network {self.id}: center must be finite")
        object.__setattr__(self, "center", Point3(*map(float, self.center)))


@dataclass(frozen=True)
class Scene:
    """Axis-aligned cubic region of edge ``region_edge`` with ``T`` networks."""

    region_origin: Point3
    region_edge: float
    networks: tuple[LicensedNetwork, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.region_edge > 0:
            raise ValueError(f"region edge must be positive, got {self.region_edge}")
        object.__setattr__(self, "region_origin", Point3(*map(float, self.region_origin)))
        nets = tuple(self.networks)
        ids = [n.id for n in nets]
        if ids != list(range(1, len(nets) + 1)):
            raise ValueError(f"network ids must be 1..T in order, got {ids}")
        object.__setattr__(self, "networks", nets)

    @classmethod
    def from_spheres(
        cls,
        origin: Sequence[float],
        edge: float,
        spheres: Sequence[tuple[Sequence[float], float]],
    ) -> Scene:
        """Build a scene from ``(center, radius)`` pairs, numbering networks from 1."""
        nets = tuple(
            LicensedNetwork(k, Point3(*c), float(r)) for k, (c, r) in enumerate(spheres, start=1)
        )
        return cls(Point3(*origin), float(edge), nets)

    @classmethod
    def random_spheres(
        cls,
        seed: int,
        T: int = 3,
        edge: float = 1000.0,
        radius_range: tuple[float, float] = (0.2, 0.6),
    ) -> Scene:
        """``T`` spheres with centers uniform in the region ``[0, edge]**3``.

        Radii are uniform on ``radius_range`` times ``edge``.
        """
        rng = np.random.default_rng(seed)
        lo, hi = radius_range
        spheres = [
            (tuple(rng.random(3) * edge), float(rng.uniform(lo, hi) * edge)) for _ in range(T)
        ]
        return cls.from_spheres((0.0, 0.0, 0.0), edge, spheres)

    @property
    def T(self) -> int:
        return len(self.networks)

    @property
    def N(self) -> int:
        """Number of representable radio parameters, ``2**T``."""
        return 1 << self.T

    def with_network(self, center: Sequence[float], radius: float) -> Scene:
        net = LicensedNetwork(self.T + 1, Point3(*center), float(radius))
        return Scene(self.region_origin, self.region_edge, self.networks + (net,))

    def centers(self) -> np.ndarray:
        return np.array([n.center for n in self.networks], dtype=float).reshape(-1, 3)

    def radii(self) -> np.ndarray:
        return np.array([n.radius for n in self.networks], dtype=float)

    def contains(self, points) -> np.ndarray:
        """Boolean mask of points inside the closed region box."""
        p = np.asarray(points, dtype=float)
        lo = np.asarray(self.region_origin)
        return np.all((p >= lo) & (p <= lo + self.region_edge), axis=-1)


def _network(scene: Scene, k: int) -> LicensedNetwork:
    if not 1 <= k <= scene.T:
        raise KeyError(f"unknown network id {k} (scene has T={scene.T})")
    return scene.networks[k - 1]


def detect(scene: Scene, k: int, p) -> int:
    """1 if ``p`` lies in the closed coverage ball of network ``k``, else 0."""
    net = _network(scene, k)
    d2 = sum((a - b) ** 2 for a, b in zip(p, net.center))
    return int(d2 <= net.radius**2)


def radio_parameter_at(scene: Scene, p):
    """Radio parameter at one point or at an array of points of shape ``(..., 3)``.

    Returns a Python ``int`` for a single point and an ``int64`` array otherwise.
    """
    pts = np.asarray(p, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 3)
    out = np.zeros(len(pts), dtype=np.int64)
    for net in scene.networks:
        d2 = np.sum((pts - np.asarray(net.center)) ** 2, axis=1)
        out |= (d2 <= net.radius**2).astype(np.int64) << (net.id - 1)
    if single:
        return int(out[0])
    return out.reshape(np.shape(p)[:-1])


class AreaEstimate(NamedTuple):
    value: float
    stderr: float


def _unit_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def surface_area_estimate(
    scene: Scene, samples: int, seed: int = 0, chunk: int = 1 << 20
) -> AreaEstimate:
    """Monte Carlo estimate of total in-region boundary area, with its standard error.

    Each sphere gets its own substream spawned from ``seed``; the in-region
    fraction of ``samples`` uniform surface points scales ``4*pi*r**2``.
    Patches inside other spheres still count.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(max(scene.T, 1))
    total = 0.0
    var = 0.0
    for net, ss in zip(scene.networks, streams):
        rng = np.random.default_rng(ss)
        hits = 0
        left = samples
        while left:
            m = min(chunk, left)
            pts = np.asarray(net.center) + net.radius * _unit_sphere(rng, m)
            hits += int(np.count_nonzero(scene.contains(pts)))
            left -= m
        full = 4.0 * math.pi * net.radius**2
        frac = hits / samples
        total += full * frac
        var += full**2 * frac * (1.0 - frac) / samples
    return AreaEstimate(total, math.sqrt(var))


def boundary_surface_area(scene: Scene, samples: int, seed: int = 0) -> float:
    return surface_area_estimate(scene, samples, seed).value
