"""Independent checks for the plane-cut formulas.

Nothing here uses the piecewise case analysis. Closed forms come from the
inclusion-exclusion vertex sum for a cube clipped by a half-space; the Monte
Carlo estimators sample the cube directly.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np

from .planecut import QUARTER_PI

_VERTS = np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)
_SIGNS = (-1.0) ** _VERTS.sum(axis=1)


def halfspace(x, theta, alpha):
    """Unit normal (last axis) and offset of the corner half-space ``n . p <= h``."""
    x, theta, alpha = np.broadcast_arrays(*map(np.asarray, (x, theta, alpha)))
    ca = np.cos(alpha)
    n = np.stack([np.sin(theta) * ca, np.cos(theta) * ca, np.sin(alpha)], axis=-1)
    return n, x * ca


def vertex_sum(x, theta, alpha, eps=1.0):
    """Closed-form (area, volume) of the cut via the signed vertex sum.

    Vectorized over the parameter arrays. Loses precision as ``theta`` or
    ``alpha`` approach zero, where the normal has a vanishing component.
    """
    n, h = halfspace(x, theta, alpha)
    eps = np.asarray(eps, dtype=float)
    t = np.maximum(h[..., None] - eps[..., None] * (n @ _VERTS.T), 0.0)
    prod = n.prod(axis=-1)
    area = (_SIGNS * t**2).sum(-1) / (2 * prod)
    vol = (_SIGNS * t**3).sum(-1) / (6 * prod)
    return area, vol


def _stratified(rng: np.random.Generator, k: int, batch: int) -> np.ndarray:
    """Jittered ``k x k`` stratified points in the unit square, shape ``(batch, k*k, 2)``."""
    g = np.stack(np.meshgrid(np.arange(k), np.arange(k), indexing="ij"), -1).reshape(-1, 2)
    return (g[None] + rng.random((batch, k * k, 2))) / k


def _columns(x, theta, alpha, eps, rng, k):
    """Per-column quantities for projecting along each cut's dominant normal axis."""
    arrays = (np.asarray(v, dtype=float) for v in (x, theta, alpha, eps))
    x, theta, alpha, eps = np.broadcast_arrays(*arrays)
    n, h = halfspace(x, theta, alpha)
    n = n.reshape(-1, 3)
    h = h.reshape(-1)
    eps = eps.reshape(-1)
    c = np.argmax(n, axis=1)
    others = np.array([[1, 2], [0, 2], [0, 1]])[c]
    nc = n[np.arange(len(n)), c]
    na = np.take_along_axis(n, others, axis=1)
    uv = _stratified(rng, k, len(n)) * eps[:, None, None]
    proj = np.einsum("bkj,bj->bk", uv, na)
    return h, nc, proj, eps


def mc_volume(x, theta, alpha, eps=1.0, *, points: int = 1 << 16, seed: int = 0):
    """Stratified Monte Carlo volume of the cube on the ``O`` side of the plane.

    Points are drawn on the face orthogonal to the largest normal component;
    the clipped column height above each point is exact, so only the two
    in-face coordinates are sampled.
    """
    shape = np.broadcast(x, theta, alpha, eps).shape
    k = max(int(math.isqrt(points)), 1)
    rng = np.random.default_rng(seed)
    h, nc, proj, eps = _columns(x, theta, alpha, eps, rng, k)
    z = np.clip((h[:, None] - proj) / nc[:, None], 0.0, eps[:, None])
    return (z.mean(axis=1) * eps**2).reshape(shape)


def slab_area(
    x, theta, alpha, eps=1.0, *, thickness: float = 1e-3, points: int = 1 << 16, seed: int = 0
):
    """Cut area as (volume of a thin slab around the plane) / (slab thickness).

    ``thickness`` is relative to ``eps``; both slab faces share the sample
    points, so the estimate is the slab volume over its width.
    """
    shape = np.broadcast(x, theta, alpha, eps).shape
    k = max(int(math.isqrt(points)), 1)
    rng = np.random.default_rng(seed)
    h, nc, proj, eps = _columns(x, theta, alpha, eps, rng, k)
    tau = thickness * eps
    top = np.clip((h[:, None] + tau[:, None] / 2 - proj) / nc[:, None], 0.0, eps[:, None])
    bot = np.clip((h[:, None] - tau[:, None] / 2 - proj) / nc[:, None], 0.0, eps[:, None])
    out = (top - bot).mean(axis=1) * eps**2 / tau
    return out.reshape(shape)


def hit_or_miss_volume(x, theta, alpha, eps=1.0, *, points: int = 10**6, seed: int = 0):
    """Plain uniform-point volume estimate for a single cut, with its standard error."""
    n, h = halfspace(x, theta, alpha)
    rng = np.random.default_rng(seed)
    p = rng.random((points, 3)) * eps
    frac = np.count_nonzero(p @ n <= h) / points
    return frac * eps**3, math.sqrt(frac * (1 - frac) / points) * eps**3


def band_chord_length(
    x, theta, eps=1.0, *, band: float = 1e-3, points: int = 10**7, seed: int = 0
) -> float:
    """Bottom-face chord length as (area of a thin band around the line) / band width."""
    rng = np.random.default_rng(seed)
    u = np.array([math.sin(theta), math.cos(theta)])
    w = band * eps
    hits = 0
    left = points
    while left:
        m = min(left, 1 << 21)
        q = rng.random((m, 2)) * eps
        hits += int(np.count_nonzero(np.abs(q @ u - x) <= w / 2))
        left -= m
    return hits / points * eps**2 / w


class SampledConstant(NamedTuple):
    value: float
    stderr: float
    area: float
    rpe: float


def sample_theorem2(draws: int = 10**6, seed: int = 0, eps: float = 1.0) -> SampledConstant:
    """Sampling estimate of ``eps**2 E[P] / E[S]`` under the uniform parameter densities.

    Each draw is evaluated with the vertex-sum closed form; the standard error
    of the ratio uses the delta method.
    """
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, QUARTER_PI, draws)
    alpha = rng.uniform(0.0, QUARTER_PI, draws)
    x = rng.random(draws) * (math.sqrt(2) / 2 * eps * np.sin(theta + QUARTER_PI))
    area, vol = vertex_sum(x, theta, alpha, eps)
    p = vol / eps**3
    ms, mp = area.mean(), p.mean()
    q = eps**2 * mp / ms
    resid = eps**2 * p - q * area
    se = resid.std(ddof=1) / math.sqrt(draws) / ms
    return SampledConstant(float(q), float(se), float(ms), float(mp))
