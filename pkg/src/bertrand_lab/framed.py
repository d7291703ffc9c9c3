"""Framed curves (gamma, nu1, nu2) and their curvature (l, m, n, alpha).

Along a framed curve the moving frame (nu1, nu2, mu = nu1 x nu2) obeys

    nu1' =  l nu2 + m mu
    nu2' = -l nu1 + n mu
    mu'  = -m nu1 - n nu2
    gamma' = alpha mu

and gamma is singular exactly where alpha vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import GridMismatch, InvalidInit
from .expr import Expr, as_expr, evaluate
from .geom import FramePair, Grid, cross, dot, norm, orthonormalize
from .numerics import cumulative_integral, derivative, max_abs, rel_error
from .tolerances import DEFAULT, Tolerances

COMPONENTS = ("l", "m", "n", "alpha")


@dataclass(frozen=True, eq=False)
class FramedCurvature:
    """Samples of (l, m, n, alpha) on a parameter grid."""

    param: np.ndarray
    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        for name in ("param",) + COMPONENTS:
            arr = np.asarray(getattr(self, name))
            arr = np.broadcast_to(arr, np.shape(self.param)).copy() if name != "param" else arr
            object.__setattr__(self, name, arr)

    @classmethod
    def from_exprs(cls, l, m, n, alpha, grid: "Grid | np.ndarray", constants: dict | None = None) -> "FramedCurvature":
        tv = grid.values if isinstance(grid, Grid) else np.asarray(grid, float)
        vals = [evaluate(as_expr(e), tv, constants) for e in (l, m, n, alpha)]
        return cls(tv, *vals)

    def as_array(self) -> np.ndarray:
        """Shape (4, N) stack in the order l, m, n, alpha."""
        return np.stack([self.l, self.m, self.n, self.alpha])

    @property
    def scale(self) -> float:
        return max_abs(self.as_array())

    def swapped(self) -> "FramedCurvature":
        return FramedCurvature(self.param, -self.l, -self.n, -self.m, -self.alpha)

    def deviation(self, other: "FramedCurvature", sl: slice = slice(None)) -> float:
        """Largest componentwise mixed relative/absolute difference."""
        return float(rel_error(self.as_array()[:, sl], other.as_array()[:, sl]).max())


@dataclass(frozen=True, eq=False)
class FramedCurve:
    """Sampled framed curve; ``curvature`` holds analytic samples when known."""

    grid: Grid
    gamma: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    curvature: FramedCurvature | None = None
    drift: float | None = None  # largest Delta defect seen before re-projection

    @property
    def param(self) -> np.ndarray:
        return self.grid.values

    @property
    def mu(self) -> np.ndarray:
        return cross(self.nu1, self.nu2)

    def delta_defect(self) -> float:
        return FramePair(self.nu1, self.nu2).defect()

    def frame_residual(self, scale: float | None = None) -> float:
        """max |gamma' . nu_i| relative to ``scale`` (default max |gamma'|), by finite differences."""
        dg = derivative(self.gamma, self.param)
        scale = max(float(norm(dg).max()), scale or 0.0) or 1.0
        r = np.maximum(np.abs(dot(dg, self.nu1)), np.abs(dot(dg, self.nu2)))
        return float(r.max()) / scale

    def check(self, tol: Tolerances = DEFAULT) -> bool:
        return self.delta_defect() <= tol.unit * 100 and self.frame_residual() <= tol.frame

    def vector(self, which: str) -> np.ndarray:
        return {"nu1": self.nu1, "nu2": self.nu2, "mu": self.mu}[which]


@dataclass(frozen=True)
class FramedInit:
    gamma0: np.ndarray
    pair0: FramePair

    @classmethod
    def from_flat(cls, values) -> "FramedInit":
        """Nine reals, row-major: nu1, nu2, gamma0."""
        v = np.asarray(values, dtype=float)
        if v.shape != (9,):
            raise InvalidInit(f"initial data needs 9 reals, got {v.size}")
        return cls(v[6:9], FramePair(v[0:3], v[3:6]))

    def validate(self, tol: float = 1e-9) -> None:
        defect = self.pair0.defect()
        if not defect <= tol:
            raise InvalidInit(f"initial pair is not in Delta (defect {defect:.3e})")


def integrate_framed(
    curv: "tuple[Expr | str, Expr | str, Expr | str, Expr | str]",
    init: FramedInit,
    grid: Grid,
    constants: dict | None = None,
    dtype=np.float64,
) -> FramedCurve:
    """Realise a framed curve with the given curvature expressions.

    RK4 with step equal to the grid spacing; after every step the pair is
    projected back onto Delta and the pre-projection defect is recorded.
    """
    init.validate()
    exprs = [as_expr(e) for e in curv]
    tv = grid.values
    mids = tv[:-1] + 0.5 * np.diff(tv)
    nodes = np.stack([np.broadcast_to(evaluate(e, tv, constants), tv.shape) for e in exprs], axis=1).astype(dtype)
    half = np.stack([np.broadcast_to(evaluate(e, mids, constants), mids.shape) for e in exprs], axis=1).astype(dtype)
    h = np.diff(tv.astype(dtype))

    def rhs(y: np.ndarray, c: np.ndarray) -> np.ndarray:
        _, v1, v2 = y
        l, m, n, a = c
        mu = cross(v1, v2)
        return np.stack([a * mu, l * v2 + m * mu, -l * v1 + n * mu])

    out = np.empty((len(tv), 3, 3), dtype=dtype)
    y = np.array([init.gamma0, init.pair0.nu1, init.pair0.nu2], dtype=dtype)
    v1, v2 = orthonormalize(y[1], y[2])
    y[1], y[2] = v1, v2
    out[0] = y
    drift = 0.0
    for i in range(len(tv) - 1):
        hi = h[i]
        k1 = rhs(y, nodes[i])
        k2 = rhs(y + 0.5 * hi * k1, half[i])
        k3 = rhs(y + 0.5 * hi * k2, half[i])
        k4 = rhs(y + hi * k3, nodes[i + 1])
        y = y + hi / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        drift = max(drift, FramePair(y[1], y[2]).defect())
        y[1], y[2] = orthonormalize(y[1], y[2])
        out[i + 1] = y
    analytic = FramedCurvature(tv, *(nodes[:, j].astype(float) for j in range(4)))
    return FramedCurve(grid, out[:, 0], out[:, 1], out[:, 2], analytic, float(drift))


def framed_from_samples(param, gamma, nu1, nu2, curvature: FramedCurvature | None = None) -> FramedCurve:
    return FramedCurve(Grid.from_values(param), np.asarray(gamma), np.asarray(nu1), np.asarray(nu2), curvature)


def recompute_curvature(fc: FramedCurve) -> FramedCurvature:
    """Curvature from the sample arrays by finite differences.

    l is taken as the antisymmetric average (nu1'.nu2 - nu2'.nu1)/2, equal
    to nu1'.nu2 on exact data, so that swapping the frame flips its sign
    exactly.
    """
    t = fc.param
    d1 = derivative(fc.nu1, t)
    d2 = derivative(fc.nu2, t)
    dg = derivative(fc.gamma, t)
    mu = fc.mu
    l = 0.5 * (dot(d1, fc.nu2) - dot(d2, fc.nu1))
    return FramedCurvature(t, l, dot(d1, mu), dot(d2, mu), dot(dg, mu))


def curvature_of(fc: FramedCurve) -> FramedCurvature:
    """Analytic samples when attached, otherwise recomputed."""
    return fc.curvature if fc.curvature is not None else recompute_curvature(fc)


def rotate_pair(nu1: np.ndarray, nu2: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = np.cos(theta)[:, None]
    s = np.sin(theta)[:, None]
    return c * nu1 - s * nu2, s * nu1 + c * nu2


def adapted_frame(fc: FramedCurve, theta0: float = 0.0) -> tuple[FramedCurve, np.ndarray]:
    """Rotate the frame by theta = integral of l so the new l vanishes.

    Returns the rotated curve and theta (anchored at theta(t0) = theta0).
    """
    curv = curvature_of(fc)
    theta = cumulative_integral(curv.l, fc.param, initial=theta0)
    v1, v2 = rotate_pair(fc.nu1, fc.nu2, theta)
    c, s = np.cos(theta), np.sin(theta)
    new = None
    if fc.curvature is not None:
        new = FramedCurvature(fc.param, np.zeros_like(theta), curv.m * c - curv.n * s, curv.m * s + curv.n * c, curv.alpha)
    return replace(fc, nu1=v1, nu2=v2, curvature=new), theta


def swap_frame(fc: FramedCurve) -> FramedCurve:
    """(gamma, nu2, nu1); its curvature is (-l, -n, -m, -alpha)."""
    curv = None if fc.curvature is None else fc.curvature.swapped()
    return replace(fc, nu1=fc.nu2, nu2=fc.nu1, curvature=curv)


@dataclass(frozen=True)
class Congruence:
    congruent: bool
    deviation: float

    def __bool__(self) -> bool:
        return self.congruent


def congruent(fc1: FramedCurve, fc2: FramedCurve, tol: float = 1e-4) -> Congruence:
    """Compare recomputed curvature quadruples on a shared grid."""
    if not fc1.grid.same_as(fc2.grid):
        raise GridMismatch("framed curves are sampled on different grids")
    dev = recompute_curvature(fc1).deviation(recompute_curvature(fc2))
    return Congruence(dev <= tol, dev)


def singular_points(fc: FramedCurve, tol: Tolerances = DEFAULT, alpha: np.ndarray | None = None) -> list[float]:
    """Parameters where alpha vanishes: sign changes refined by brentq on a
    cubic interpolant, plus samples with |alpha| below a scale-aware threshold.
    """
    t = fc.param
    a = recompute_curvature(fc).alpha if alpha is None else np.asarray(alpha, float)
    t = np.asarray(t, float)
    a = np.asarray(a, float)
    scale = max_abs(a)
    if scale == 0.0:
        return [float(t[0])]
    small = np.abs(a) <= tol.zero * scale
    spline = CubicSpline(t, a)
    roots: list[float] = []
    for i in range(len(t) - 1):
        if small[i] or small[i + 1]:
            continue
        if a[i] * a[i + 1] < 0:
            roots.append(float(brentq(spline, t[i], t[i + 1], xtol=1e-14, rtol=1e-14)))
    for i in np.flatnonzero(small):
        lo, hi = max(i - 1, 0), min(i + 1, len(t) - 1)
        root = float(t[i])
        for j, k in ((lo, i), (i, hi)):
            if j != k and spline(t[j]) * spline(t[k]) < 0:
                root = float(brentq(spline, t[j], t[k], xtol=1e-14, rtol=1e-14))
                break
        roots.append(root)
    roots.sort()
    h = float(np.min(np.diff(t)))
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > 0.5 * h:
            out.append(r)
    return out
