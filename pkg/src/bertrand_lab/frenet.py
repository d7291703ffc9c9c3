"""Frenet apparatus of space curves, arc length, and curves from (kappa, tau)."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import Degenerate, DegenerateInput, InvalidInit, NotRegular
from .expr import CurveSpec, Expr, as_expr, evaluate
from .geom import Grid, cross, det3, dot, norm, orthonormalize
from .numerics import adaptive_simpson, adaptive_simpson_cumulative, cumulative_integral, derivative
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class FrenetSample:
    param: float
    gamma: np.ndarray
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: float
    tau: float
    speed: float


@dataclass(frozen=True, eq=False)
class Apparatus:
    """Frenet apparatus sampled on a grid; one row per parameter value.

    ``s`` is arc length measured from the first sample. Indexing yields a
    FrenetSample, so the object behaves like an array of samples.
    """

    param: np.ndarray
    s: np.ndarray
    gamma: np.ndarray
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    speed: np.ndarray

    def __len__(self) -> int:
        return len(self.param)

    def __getitem__(self, i: int) -> FrenetSample:
        return FrenetSample(
            float(self.param[i]),
            self.gamma[i],
            self.t[i],
            self.n[i],
            self.b[i],
            float(self.kappa[i]),
            float(self.tau[i]),
            float(self.speed[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def d_ds(self, values: np.ndarray) -> np.ndarray:
        """Arc-length derivative of sampled values, by finite differences."""
        d = derivative(values, self.param)
        return d / self.speed.reshape((-1,) + (1,) * (np.ndim(values) - 1))

    @property
    def kappa_prime(self) -> np.ndarray:
        return self.d_ds(self.kappa)

    @property
    def tau_prime(self) -> np.ndarray:
        return self.d_ds(self.tau)

    def frame(self, which: str) -> np.ndarray:
        return {"T": self.t, "N": self.n, "B": self.b}[which]


@dataclass(frozen=True)
class NondegeneracyReport:
    ok: bool
    witness: float | None
    min_cross_norm: float
    threshold: float


def _apparatus(
    param: np.ndarray,
    gamma: np.ndarray,
    d1: np.ndarray,
    d2: np.ndarray,
    d3: np.ndarray,
    s: np.ndarray | None,
    tol: Tolerances,
) -> Apparatus:
    speed = norm(d1)
    scale = float(speed.max())
    i = int(np.argmin(speed))
    if speed[i] <= tol.reg * scale or scale == 0.0:
        raise NotRegular(param[i], speed[i])
    c = cross(d1, d2)
    cn = norm(c)
    i = int(np.argmin(cn))
    if cn[i] <= tol.deg * scale**2:
        raise Degenerate(param[i], cn[i])
    t = d1 / speed[:, None]
    b = c / cn[:, None]
    n = cross(b, t)
    kappa = cn / speed**3
    tau = det3(d1, d2, d3) / cn**2
    if s is None:
        s = cumulative_integral(speed.astype(float), np.asarray(param, float))
    return Apparatus(param, s, gamma, t, n, b, kappa, tau, speed)


def check_nondegenerate(curve: CurveSpec, grid: Grid, tol: Tolerances = DEFAULT) -> NondegeneracyReport:
    tv = grid.values
    d1 = curve.evaluate(tv, 1)
    d2 = curve.evaluate(tv, 2)
    cn = norm(cross(d1, d2))
    scale = float(norm(d1).max())
    threshold = tol.deg * scale**2
    i = int(np.argmin(cn))
    ok = bool(cn[i] > threshold)
    return NondegeneracyReport(ok, None if ok else float(tv[i]), float(cn[i]), threshold)


def _speed_fn(curve: CurveSpec):
    return lambda t: norm(curve.evaluate(t, 1))


def frenet_apparatus(curve: CurveSpec, grid: Grid, tol: Tolerances = DEFAULT) -> Apparatus:
    """Apparatus from exact (symbolic) derivatives of the curve expressions."""
    tv = grid.values
    d = [curve.evaluate(tv, k) for k in range(4)]
    speed = norm(d[1])
    if np.any(speed <= tol.reg * speed.max()):
        i = int(np.argmin(speed))
        raise NotRegular(tv[i], speed[i])
    s = adaptive_simpson_cumulative(_speed_fn(curve), tv)
    return _apparatus(tv, d[0], d[1], d[2], d[3], s, tol)


def apparatus_from_samples(param: np.ndarray, gamma: np.ndarray, tol: Tolerances = DEFAULT) -> Apparatus:
    """Apparatus of sampled positions, derivatives by finite differences.

    This path never touches the expression language, so it serves as an
    independent check on anything computed symbolically.
    """
    dtype = np.result_type(np.asarray(param).dtype, np.asarray(gamma).dtype, np.float64)
    param = np.asarray(param, dtype)
    gamma = np.asarray(gamma, dtype)
    d1 = derivative(gamma, param, 1)
    d2 = derivative(gamma, param, 2)
    d3 = derivative(gamma, param, 3)
    return _apparatus(param, gamma, d1, d2, d3, None, tol)


def frenet_residuals(app: Apparatus) -> np.ndarray:
    """Per-sample Frenet-Serret residuals, normalised by (1+|k|+|tau|)*speed.

    Derivatives of the frame come from finite differences of the arrays.
    """
    v, k, tau = app.speed[:, None], app.kappa[:, None], app.tau[:, None]
    dt = derivative(app.t, app.param)
    dn = derivative(app.n, app.param)
    db = derivative(app.b, app.param)
    r = np.stack(
        [
            norm(dt - v * k * app.n),
            norm(dn + v * k * app.t - v * tau * app.b),
            norm(db + v * tau * app.n),
        ],
        axis=-1,
    ).max(axis=-1)
    return r / ((1 + np.abs(app.kappa) + np.abs(app.tau)) * app.speed)


@dataclass(frozen=True, eq=False)
class ArcLengthTable:
    """s(t) on the input grid plus its inverse t(s) on a uniform s grid."""

    t: np.ndarray
    s: np.ndarray
    length: float
    s_grid: np.ndarray
    t_of_s: np.ndarray
    apparatus: Apparatus  # resampled in arc length, param = s_grid
    fd_speed_error: float  # max | |d gamma/ds| - 1 | by finite differences


def arc_length_reparam(
    curve: CurveSpec,
    grid: Grid,
    n_samples: int | None = None,
    tol: Tolerances = DEFAULT,
    newton_tol: float = 1e-13,
) -> ArcLengthTable:
    """Arc-length table by adaptive Simpson, inverted with Newton's method."""
    tv = grid.values
    speed_fn = _speed_fn(curve)
    sp = speed_fn(tv)
    scale = float(sp.max())
    i = int(np.argmin(sp))
    if sp[i] <= tol.reg * scale or scale == 0.0:
        raise NotRegular(tv[i], sp[i])
    s = adaptive_simpson_cumulative(speed_fn, tv)
    length = float(s[-1])
    n_out = n_samples or len(tv)
    s_grid = np.linspace(0.0, length, n_out)
    s_grid[-1] = length

    # Newton on S(t) - s = 0, where S(t) = s[k] + integral over [tv[k], t]
    k = np.clip(np.searchsorted(s, s_grid, side="right") - 1, 0, len(tv) - 2)
    frac = (s_grid - s[k]) / (s[k + 1] - s[k])
    t_est = tv[k] + frac * (tv[k + 1] - tv[k])
    for _ in range(50):
        resid = s[k] + adaptive_simpson(speed_fn, tv[k], t_est) - s_grid
        step = resid / speed_fn(t_est)
        t_est = np.clip(t_est - step, tv[0], tv[-1])
        if np.max(np.abs(step)) <= newton_tol * max(1.0, abs(tv[-1] - tv[0])):
            break
    t_est[0], t_est[-1] = tv[0], tv[-1]

    d = [curve.evaluate(t_est, j) for j in range(4)]
    base = _apparatus(t_est, d[0], d[1], d[2], d[3], s_grid, tol)
    # chain rule: d/ds = (1/|gamma'|) d/dt, hence |d gamma/ds| = |gamma'| / |gamma'|
    unit_speed = base.speed * (1.0 / base.speed)
    app = replace(base, param=s_grid, speed=unit_speed)
    fd = norm(derivative(d[0], s_grid))
    return ArcLengthTable(tv, s, length, s_grid, t_est, app, float(np.max(np.abs(fd - 1.0))))


@dataclass(frozen=True)
class FrenetInit:
    gamma0: np.ndarray
    t0: np.ndarray
    n0: np.ndarray
    b0: np.ndarray

    def __post_init__(self):
        for name in ("gamma0", "t0", "n0", "b0"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))

    @classmethod
    def standard(cls) -> "FrenetInit":
        return cls(np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))

    def validate(self, tol: float = 1e-9) -> None:
        t, n, b = self.t0, self.n0, self.b0
        worst = max(
            abs(norm(t) - 1),
            abs(norm(n) - 1),
            abs(norm(b) - 1),
            abs(dot(t, n)),
            abs(dot(t, b)),
            abs(dot(n, b)),
            float(norm(cross(t, n) - b)),
        )
        if not worst <= tol:
            raise InvalidInit(f"initial frame is not right-handed orthonormal (defect {worst:.3e})")


def integrate_frenet(
    kappa: "Expr | str",
    tau: "Expr | str",
    init: FrenetInit,
    grid: Grid,
    constants: dict | None = None,
    dtype=np.float64,
) -> Apparatus:
    """Realise the unit-speed curve with curvature ``kappa`` and torsion ``tau``.

    ``grid`` is an arc-length grid. Classical RK4 on (gamma, t, n, b) with the
    step equal to the grid spacing; the frame is pushed back onto SO(3) after
    every step (Gram-Schmidt on t then n, b = t x n). ``dtype`` selects the
    working precision of the state; np.longdouble is useful when the output
    feeds finite-difference checks near degenerate points.
    """
    init.validate()
    kappa, tau = as_expr(kappa), as_expr(tau)
    sv = grid.values
    mids = sv[:-1] + 0.5 * np.diff(sv)
    k_nodes = np.broadcast_to(evaluate(kappa, sv, constants), sv.shape)
    t_nodes = np.broadcast_to(evaluate(tau, sv, constants), sv.shape)
    k_mid = np.broadcast_to(evaluate(kappa, mids, constants), mids.shape)
    t_mid = np.broadcast_to(evaluate(tau, mids, constants), mids.shape)
    if np.any(k_nodes <= 0) or np.any(k_mid <= 0):
        i = int(np.argmin(k_nodes))
        raise DegenerateInput(f"curvature must be positive, got {k_nodes[i]!r} at s={sv[i]!r}")

    def rhs(y: np.ndarray, k: float, tq: float) -> np.ndarray:
        _, t, n, b = y
        return np.stack([t, k * n, -k * t + tq * b, -tq * n])

    n_pts = len(sv)
    svd = sv.astype(dtype)
    h = np.diff(svd)
    k_nodes, t_nodes = k_nodes.astype(dtype), t_nodes.astype(dtype)
    k_mid, t_mid = k_mid.astype(dtype), t_mid.astype(dtype)
    out = np.empty((n_pts, 4, 3), dtype=dtype)
    y = np.array([init.gamma0, init.t0, init.n0, init.b0], dtype=dtype)
    out[0] = y
    for i in range(n_pts - 1):
        hi = h[i]
        k1 = rhs(y, k_nodes[i], t_nodes[i])
        k2 = rhs(y + 0.5 * hi * k1, k_mid[i], t_mid[i])
        k3 = rhs(y + 0.5 * hi * k2, k_mid[i], t_mid[i])
        k4 = rhs(y + hi * k3, k_nodes[i + 1], t_nodes[i + 1])
        y = y + hi / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t, n = orthonormalize(y[1], y[2])
        y[1], y[2], y[3] = t, n, cross(t, n)
        out[i + 1] = y
    return Apparatus(
        param=svd,
        s=svd - svd[0],
        gamma=out[:, 0],
        t=out[:, 1],
        n=out[:, 2],
        b=out[:, 3],
        kappa=k_nodes,
        tau=t_nodes,
        speed=np.ones(n_pts, dtype=dtype),
    )
