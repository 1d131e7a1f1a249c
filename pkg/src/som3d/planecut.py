"""Area and corner volume of a plane slicing a cube, and their expectations.

Coordinates follow the usual construction: vertex ``O`` of a cube of side
``eps`` sits at the origin, the boundary plane meets the bottom face in a line
at distance ``x`` from ``O`` making angle ``theta`` with the horizontal edge,
and the plane is tilted by ``alpha`` so that its trace on the top face is
``eps * tan(alpha)`` closer to ``O``. Equivalently the corner region is the
half-space ``n . p <= x cos(alpha)`` with unit normal
``n = (sin(theta) cos(alpha), cos(theta) cos(alpha), sin(alpha))``.

The cut area follows four case families (``a`` vs ``x2`` crossed with ``2a``
vs ``x1``). Corner volumes are accumulated stage by stage between the
family's breakpoints; inside a stage the cross-section is quadratic in ``x``,
so the prismatoid rule gives each stage volume exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

QUARTER_PI = math.pi / 4
# tan(alpha) = sin(pi/4): beyond this the 2a > x1 families cover every theta
ALPHA_KNEE = math.atan(math.sqrt(2) / 2)

ALPHA_PRISM = 1e-6
_THETA_FLOOR = 1e-12
_REL_SLACK = 1e-12

THEOREM2_Q = 0.1649


@dataclass(frozen=True)
class PlaneCutParams:
    x: float
    theta: float
    alpha: float
    eps: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not 0.0 <= self.theta <= QUARTER_PI * (1 + _REL_SLACK):
            raise ValueError(f"theta must lie in [0, pi/4], got {self.theta}")
        if not 0.0 <= self.alpha <= QUARTER_PI * (1 + _REL_SLACK):
            raise ValueError(f"alpha must lie in [0, pi/4], got {self.alpha}")
        if self.x < 0:
            raise ValueError(f"x must be non-negative, got {self.x}")

    @property
    def geometry(self) -> CutGeometry:
        return CutGeometry.of(self.theta, self.alpha, self.eps, self.x)


class CutGeometry(NamedTuple):
    x1: float
    x2: float
    a: float
    h: float

    @classmethod
    def of(cls, theta: float, alpha: float, eps: float, x: float = 0.0) -> CutGeometry:
        x1 = eps * math.sin(theta)
        x2 = max(math.sqrt(2) / 2 * eps * math.sin(theta + QUARTER_PI) - x1, 0.0)
        return cls(x1, x2, eps * math.tan(alpha) / 2, x * math.cos(alpha))

    @property
    def x_max(self) -> float:
        return self.x1 + self.x2 + self.a


def case_family(theta: float, alpha: float) -> int:
    """Case family 1..4 for a ``(theta, alpha)`` cell.

    1: a < x2 and 2a < x1      2: a < x2 and 2a >= x1
    3: a >= x2 and 2a < x1     4: a >= x2 and 2a >= x1
    """
    ta = math.tan(alpha)
    s, c = math.sin(theta), math.cos(theta)
    wide = ta >= c - s
    steep = ta >= s
    return 1 + 2 * wide + steep


class _Cut:
    """Area/volume profile in ``x``, vectorized over arrays of ``(theta, alpha)``.

    ``theta``, ``alpha`` broadcast to a common shape ``P``; ``area`` and
    ``volume`` accept ``x`` of shape ``P + (k,)`` (or broadcastable to it).
    """

    def __init__(self, theta, alpha, eps: float):
        theta, alpha = np.broadcast_arrays(np.asarray(theta, float), np.asarray(alpha, float))
        self.eps = eps
        th = np.maximum(theta, _THETA_FLOOR)
        self.st, self.ct = np.sin(th), np.cos(th)
        self.sa, self.ca = np.sin(alpha), np.cos(alpha)
        self.C = self.st / self.ct + self.ct / self.st
        self.x1 = eps * self.st
        self.x2 = np.maximum(np.sqrt(2) / 2 * eps * np.sin(th + QUARTER_PI) - self.x1, 0.0)
        self.a = eps * np.tan(alpha) / 2
        x1_true = eps * np.sin(theta)
        x2_true = np.maximum(np.sqrt(2) / 2 * eps * np.sin(theta + QUARTER_PI) - x1_true, 0.0)
        self.x_max = x1_true + x2_true + self.a
        ta = np.tan(alpha)
        self.wide = ta >= np.cos(theta) - np.sin(theta)
        self.steep = ta >= np.sin(theta)
        self.prism = alpha < ALPHA_PRISM
        self.breaks = self._breakpoints()
        self._stage_cum = self._stage_volumes()

    @property
    def family(self):
        return 1 + 2 * self.wide.astype(int) + self.steep.astype(int)

    def _col(self, v):
        return np.asarray(v)[..., None]

    def _breakpoints(self) -> np.ndarray:
        x1, x2, a = self.x1, self.x2, self.a
        third = np.where(self.wide, x1 + 2 * x2, x1 + 2 * a)
        pts = np.stack([2 * a, x1, third], axis=-1)
        prism_pts = np.stack([a, x1 + a, x1 + a], axis=-1)
        pts = np.where(self.prism[..., None], prism_pts, pts)
        pts = np.clip(pts, 0.0, self.x_max[..., None])
        zero = np.zeros_like(self.x_max)[..., None]
        return np.sort(np.concatenate([zero, pts, self.x_max[..., None]], axis=-1), axis=-1)

    def area(self, x) -> np.ndarray:
        c = self._col
        x = np.asarray(x, dtype=float)
        eps = self.eps
        C, ct, sa, ca = c(self.C), c(self.ct), c(self.sa), c(self.ca)
        x1, x2, a = c(self.x1), c(self.x2), c(self.a)
        steep, wide, prism = c(self.steep), c(self.wide), c(self.prism)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            A = (x1 - (x - 2 * a)) / sa
            tri = x * x * C / (2 * sa)
            trap = (x - a) * C * eps / ca
            ramp = eps * (x - x1 / 2) / (ct * sa)
            pent = ((x - 2 * a) * C + eps / ct) / 2 * A + eps / ct * (eps / ca - A)
            flat = eps * eps / (ct * ca) + 0 * x
            first = np.where(steep, x <= x1, x <= 2 * a)
            second = np.where(steep, x <= 2 * a, x <= x1)
            out = np.select(
                [first, second, x <= x1 + 2 * a], [tri, np.where(steep, ramp, trap), pent], flat
            )
            # past the far bottom vertex at x1 + 2*x2 (only reachable when a >= x2)
            B = np.maximum(x - (x1 + 2 * x2), 0.0) / sa
            out = np.where(wide, out - C * sa / 2 * B * B, out)
        # nearly vertical plane: extrude the chord at mid height, where the
        # trace sits a = eps*tan(alpha)/2 closer to O than on the bottom face
        mid = np.maximum(x - a, 0.0)
        chord = np.where(mid <= x1, mid * C, eps / ct)
        return np.where(prism, chord * eps / ca, out)

    def _stage_volumes(self) -> np.ndarray:
        b = self.breaks
        lo, hi = b[..., :-1], b[..., 1:]
        ca = self.ca[..., None]
        v = prismatoid_volume(self.area(lo), self.area((lo + hi) / 2), self.area(hi), (hi - lo) * ca)
        zero = np.zeros(v.shape[:-1] + (1,))
        return np.concatenate([zero, np.cumsum(v, axis=-1)], axis=-1)

    def volume(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        b = self.breaks
        shape = np.broadcast_shapes(x.shape, b.shape[:-1] + (1,))
        x = np.broadcast_to(x, shape)
        stage = (x[..., None] >= b[..., None, 1:-1]).sum(-1)
        lo = np.take_along_axis(np.broadcast_to(b, shape[:-1] + b.shape[-1:]), stage, -1)
        cum = np.take_along_axis(
            np.broadcast_to(self._stage_cum, shape[:-1] + b.shape[-1:]), stage, -1
        )
        ca = self.ca[..., None]
        part = prismatoid_volume(
            self.area(lo), self.area((lo + x) / 2), self.area(x), (x - lo) * ca
        )
        return cum + part


def _cut(p: PlaneCutParams) -> _Cut:
    c = _Cut(p.theta, p.alpha, p.eps)
    if p.x > float(c.x_max) * (1 + _REL_SLACK) + 1e-300:
        raise ValueError(f"x={p.x} exceeds x_max={float(c.x_max)} for theta={p.theta}, alpha={p.alpha}")
    return c


def chord_length(params: PlaneCutParams) -> float:
    """Length of the cut line on the bottom face."""
    g = params.geometry
    if params.x > (g.x1 + g.x2) * (1 + _REL_SLACK):
        raise ValueError(f"x={params.x} outside the bottom face range [0, {g.x1 + g.x2}]")
    if params.x <= g.x1:
        if params.x == 0.0:
            return 0.0
        t = params.theta
        return params.x * (math.tan(t) + 1 / math.tan(t))
    return params.eps / math.cos(params.theta)


def cut_area(params: PlaneCutParams) -> float:
    return float(_cut(params).area([params.x])[0])


def frustum_volume(S_a: float, S_b: float, h: float) -> float:
    """Volume of a frustum with parallel similar faces ``S_a``, ``S_b`` and height ``h``."""
    if S_a < 0 or S_b < 0 or h < 0:
        raise ValueError("areas and height must be non-negative")
    return h / 3 * (S_a + S_b + math.sqrt(S_a * S_b))


def prismatoid_volume(S_a, S_mid, S_b, h):
    """Prismatoid rule; exact whenever the section area is quadratic in height."""
    return h / 6 * (S_a + 4 * S_mid + S_b)


def small_side_volume(params: PlaneCutParams) -> float:
    """Volume of the cube on the vertex-``O`` side of the plane."""
    return float(_cut(params).volume([params.x])[0])


def cut_rpe(params: PlaneCutParams) -> float:
    f = small_side_volume(params) / params.eps**3
    if f > 0.5 + 1e-9:
        warnings.warn(f"cut fraction {f} exceeds 1/2", RuntimeWarning, stacklevel=2)
    return f


@dataclass(frozen=True)
class ParameterDistributions:
    """Independent densities of the cut parameters.

    ``pdf_x`` and ``x_support`` may depend on ``theta`` and ``eps``.
    """

    pdf_x: Callable[[np.ndarray, float, float], np.ndarray]
    x_support: Callable[[float, float], tuple[float, float]]
    pdf_theta: Callable[[float], float]
    theta_support: tuple[float, float]
    pdf_alpha: Callable[[float], float]
    alpha_support: tuple[float, float]

    def check_normalized(self, eps: float = 1.0, tol: float = 1e-6) -> None:
        def mass(f, lo, hi):
            if hi <= lo:
                return 0.0
            return integrate.quad(f, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)[0]

        problems = []
        m = mass(self.pdf_theta, *self.theta_support)
        if abs(m - 1) > tol:
            problems.append(f"theta density integrates to {m}")
        m = mass(self.pdf_alpha, *self.alpha_support)
        if abs(m - 1) > tol:
            problems.append(f"alpha density integrates to {m}")
        t0, t1 = self.theta_support
        for t in (t0, (t0 + t1) / 2, t1):
            lo, hi = self.x_support(t, eps)
            m = mass(lambda x: float(np.ravel(self.pdf_x(np.array([x]), t, eps))[0]), float(lo), float(hi))
            if abs(m - 1) > tol:
                problems.append(f"x density at theta={t:.6g} integrates to {m}")
        if problems:
            raise ValueError("densities not normalized: " + "; ".join(problems))


def uniform_distributions() -> ParameterDistributions:
    """Uniform ``x`` on the bottom-face half range and uniform angles on [0, pi/4]."""

    def x_hi(theta, eps):
        return np.sqrt(2) / 2 * eps * np.sin(theta + QUARTER_PI)

    return ParameterDistributions(
        pdf_x=lambda x, t, e: 1.0 / x_hi(t, e) + 0 * x,
        x_support=lambda t, e: (0.0, x_hi(t, e)),
        pdf_theta=lambda t: 4 / math.pi,
        theta_support=(0.0, QUARTER_PI),
        pdf_alpha=lambda a: 4 / math.pi,
        alpha_support=(0.0, QUARTER_PI),
    )


def box_distributions(x: float, theta: float, alpha: float, width: float) -> ParameterDistributions:
    """Narrow uniform boxes of half-width ``width`` around one parameter triple."""

    def box(c, lo=0.0, hi=math.inf):
        return max(c - width, lo), min(c + width, hi)

    t_lo, t_hi = box(theta, 0.0, QUARTER_PI)
    a_lo, a_hi = box(alpha, 0.0, QUARTER_PI)
    x_lo, x_hi = box(x)
    return ParameterDistributions(
        pdf_x=lambda xs, t, e: np.full(np.shape(xs), 1.0 / (x_hi - x_lo)),
        x_support=lambda t, e: (x_lo, x_hi),
        pdf_theta=lambda t: 1.0 / (t_hi - t_lo),
        theta_support=(t_lo, t_hi),
        pdf_alpha=lambda a: 1.0 / (a_hi - a_lo),
        alpha_support=(a_lo, a_hi),
    )


class CutExpectation(NamedTuple):
    area: float
    rpe: float
    by_family: dict[int, tuple[float, float]]


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _theta_splits(alpha: float, lo: float, hi: float) -> list[float]:
    """Theta values where the case family changes at fixed ``alpha``."""
    ta = math.tan(alpha)
    pts = []
    if ta < math.sin(QUARTER_PI):
        pts.append(math.asin(ta))
    if ta <= math.sqrt(2):
        pts.append(math.acos(ta / math.sqrt(2)) - QUARTER_PI)
    return sorted({lo, hi, *(p for p in pts if lo < p < hi)})


def _x_moments(dists: ParameterDistributions, theta: np.ndarray, alpha: float, eps: float):
    """``int S f_X dx`` and ``int P f_X dx`` over the x support, per theta value."""
    cut = _Cut(theta, alpha, eps)
    lo, hi = (np.broadcast_to(np.asarray(v, float), theta.shape) for v in dists.x_support(theta, eps))
    hi = np.minimum(hi, cut.x_max)
    hi = np.maximum(hi, lo)
    knots = np.sort(
        np.concatenate([np.clip(cut.breaks, lo[:, None], hi[:, None]), lo[:, None], hi[:, None]], -1),
        axis=-1,
    )
    a, b = knots[:, :-1, None], knots[:, 1:, None]
    xs = ((b - a) * (_GL_X + 1) / 2 + a).reshape(len(theta), -1)
    ws = ((b - a) / 2 * _GL_W).reshape(len(theta), -1)
    ws = ws * np.broadcast_to(dists.pdf_x(xs, theta[:, None], eps), xs.shape)
    s_mom = np.sum(ws * cut.area(xs), axis=-1)
    p_mom = np.sum(ws * cut.volume(xs), axis=-1) / eps**3
    return s_mom, p_mom


def _density(pdf, t: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(pdf(t), dtype=float), t.shape)


def expected_cut_quantities(
    dists: ParameterDistributions, eps: float = 1.0, rtol: float = 1e-4
) -> CutExpectation:
    """Expected cut area and corner RPE under independent parameter densities.

    Adaptive quadrature over alpha (outer) and theta (inner); theta is split
    wherever the case family changes, so every piece lies in one family and
    its contribution is booked to that family. The x integral is
    Gauss-Legendre on each polynomial stage of the profile. Densities must
    accept numpy arrays.
    """
    dists.check_normalized(eps)
    t_lo, t_hi = dists.theta_support
    a_lo, a_hi = dists.alpha_support

    def over_theta(alpha):
        out = np.zeros(8)
        splits = _theta_splits(alpha, t_lo, t_hi)
        for lo, hi in zip(splits[:-1], splits[1:]):
            if hi <= lo:
                continue
            fam = case_family((lo + hi) / 2, alpha)

            def f(t):
                t = t[:, 0]
                s, p = _x_moments(dists, t, alpha, eps)
                return np.stack([s, p], axis=-1) * _density(dists.pdf_theta, t)[:, None]

            res = integrate.cubature(f, [lo], [hi], rtol=rtol / 10, atol=0.0)
            out[fam - 1] += res.estimate[0]
            out[fam + 3] += res.estimate[1]
        return out * float(_density(dists.pdf_alpha, np.array([alpha]))[0])

    pts = [p for p in (ALPHA_KNEE,) if a_lo < p < a_hi]
    edges = [a_lo, *pts, a_hi]
    total = np.zeros(8)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total += integrate.quad_vec(over_theta, lo, hi, epsrel=rtol / 10, epsabs=0.0)[0]
    fam = {k: (float(total[k - 1]), float(total[k + 3])) for k in range(1, 5)}
    return CutExpectation(float(total[:4].sum()), float(total[4:].sum()), fam)


def theorem2_constant(eps: float = 1.0, rtol: float = 1e-4) -> float:
    """Dimensionless ``eps**2 * E[P] / E[S]`` under uniform parameter densities."""
    e = expected_cut_quantities(uniform_distributions(), eps, rtol)
    return eps**2 * e.rpe / e.area


def predicted_rpe(S: float, L: float, M: float, Q: float = THEOREM2_Q) -> float:
    """Grid RPE predicted from boundary area ``S``, region edge ``L`` and cube count ``M``."""
    if S < 0 or L <= 0 or M <= 0 or Q <= 0:
        raise ValueError("L, M and Q must be positive and S non-negative")
    return Q * (S / L**2) * M ** (-1.0 / 3.0)
