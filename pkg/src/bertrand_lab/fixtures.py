"""Reference curves with known geometry, shared by tests, the CLI verify mode
and the example job files."""

from __future__ import annotations

import math

import numpy as np

from .expr import CurveSpec
from .framed import FramedCurvature, FramedCurve, FramedInit, framed_from_samples
from .geom import FramePair, Grid, cross, norm

HELIX = CurveSpec("cos(t)", "sin(t)", "t", 0.0, 2 * math.pi)


def circle(radius: float = 2.0, t0: float = 0.0, t1: float = 2 * math.pi) -> CurveSpec:
    return CurveSpec("r*cos(t)", "r*sin(t)", "0", t0, t1, {"r": radius})


def periodic_grid(n: int, period: float = 2 * math.pi) -> Grid:
    """n samples of [0, period), the right end excluded."""
    return Grid.uniform(0.0, period * (n - 1) / n, n)


# -- the rotating-frame example with curvature (0, p cos t, p sin t, sin qt) ---

EXAMPLE_CURVATURE = ("0", "p*cos(t)", "p*sin(t)", "sin(q*t)")


def example_constants(p: float = 1.0, q: float = 2.0) -> dict[str, float]:
    if p == 0 or q == 0 or abs(q * q - (1 + p * p)) < 1e-12:
        raise ValueError("need p, q non-zero and q^2 != 1 + p^2")
    return {"p": float(p), "q": float(q)}


def example_closed_form(t: np.ndarray, p: float = 1.0, q: float = 2.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact gamma, nu1, nu2 of the example."""
    t = np.asarray(t, float)
    r = math.sqrt(1 + p * p)
    a, b = q + r, q - r
    gamma = np.stack(
        [
            -p / 2 * (-np.cos(a * t) / a - np.cos(b * t) / b),
            p / 2 * (np.sin(a * t) / a - np.sin(b * t) / b),
            -np.cos(q * t) / q,
        ],
        axis=-1,
    ) / r
    c, d = 1 + r, 1 - r
    nu1 = (p / r) * np.stack(
        [
            -p / 2 * (np.sin(c * t) / c + np.sin(d * t) / d),
            p / 2 * (np.cos(c * t) / c - np.cos(d * t) / d),
            np.sin(t),
        ],
        axis=-1,
    )
    nu2 = (p / r) * np.stack(
        [
            -p / 2 * (-np.cos(c * t) / c - np.cos(d * t) / d),
            p / 2 * (np.sin(c * t) / c - np.sin(d * t) / d),
            -np.cos(t),
        ],
        axis=-1,
    )
    return gamma, nu1, nu2


def example_init(p: float = 1.0, q: float = 2.0) -> FramedInit:
    g, v1, v2 = example_closed_form(np.array([0.0]), p, q)
    return FramedInit(g[0], FramePair(v1[0], v2[0]))


def example_framed(n: int = 1024, p: float = 1.0, q: float = 2.0) -> FramedCurve:
    """Closed-form samples on [0, 2 pi) with the analytic curvature attached."""
    grid = periodic_grid(n)
    g, v1, v2 = example_closed_form(grid.values, p, q)
    curv = FramedCurvature.from_exprs(*EXAMPLE_CURVATURE, grid, example_constants(p, q))
    return FramedCurve(grid, g, v1, v2, curv)


# -- spherical Legendre curves ------------------------------------------------


def spherical_legendre(n: int = 801, t0: float = 0.0, t1: float = 2.0) -> FramedCurve:
    """(gamma, gamma, nu) for gamma on the unit sphere and nu = gamma x gamma' normalised.

    The base curve is a tilted latitude-like loop; its curvature is
    (0, m, n, m) with m, n not constant.
    """
    spec = CurveSpec(
        "cos(t)*cos(a*sin(t))",
        "sin(t)*cos(a*sin(t))",
        "sin(a*sin(t))",
        t0,
        t1,
        {"a": 0.4},
    )
    grid = Grid.uniform(t0, t1, n)
    g = spec.evaluate(grid.values)
    dg = spec.evaluate(grid.values, 1)
    nu = cross(g, dg)
    nu = nu / norm(nu)[:, None]
    return framed_from_samples(grid.values, g, g, nu)


def straight_line_rotating(n: int = 401, omega: float = 1.5, t1: float = 3.0) -> FramedCurve:
    """Line along e3 with a frame spinning about it: curvature (omega, 0, 0, 1)."""
    grid = Grid.uniform(0.0, t1, n)
    t = grid.values
    z = np.zeros_like(t)
    gamma = np.stack([z, z, t], axis=-1)
    nu1 = np.stack([np.cos(omega * t), np.sin(omega * t), z], axis=-1)
    nu2 = np.stack([-np.sin(omega * t), np.cos(omega * t), z], axis=-1)
    curv = FramedCurvature(t, np.full_like(t, omega), z, z, np.ones_like(t))
    return FramedCurve(grid, gamma, nu1, nu2, curv)


# -- random families for fuzzing -------------------------------------------------


def random_curve(rng: np.random.Generator, n: int = 257) -> tuple[CurveSpec, Grid]:
    """A perturbed helix with random coefficients; curvature stays positive
    because the perturbation is small against the helix terms."""
    r = rng.uniform(0.5, 2.0)
    h = rng.uniform(-1.5, 1.5)
    e = rng.uniform(-0.08, 0.08, size=3)
    k = rng.integers(2, 4, size=3)
    c = {"r": r, "h": h, "e1": e[0], "e2": e[1], "e3": e[2], "k1": float(k[0]), "k2": float(k[1]), "k3": float(k[2])}
    spec = CurveSpec(
        "r*cos(t) + e1*sin(k1*t)",
        "r*sin(t) + e2*cos(k2*t)",
        "h*t + e3*sin(k3*t)",
        0.0,
        float(rng.uniform(2.0, 5.0)),
        {key: float(v) for key, v in c.items()},
    )
    return spec, Grid.uniform(spec.t0, spec.t1, n)


RANDOM_FRAMED_SHAPES = ("generic", "legendre", "flat", "constant")


def random_framed_curvature(rng: np.random.Generator) -> tuple[tuple[str, str, str, str], dict[str, float]]:
    """Random (l, m, n, alpha) expressions with named coefficients.

    The shapes mix generic quadruples with ones where l or (m, n) vanish or
    everything is constant, so both verdicts occur among the kinds.
    """
    shape = RANDOM_FRAMED_SHAPES[int(rng.integers(len(RANDOM_FRAMED_SHAPES)))]
    c = {f"c{i}": float(v) for i, v in enumerate(rng.uniform(-2.0, 2.0, size=8))}
    c.update({f"w{i}": float(v) for i, v in enumerate(rng.uniform(0.5, 3.0, size=4))})
    l = "c0 + c1*sin(w0*t)"
    m = "c2*cos(w1*t) + c3"
    n = "c4*sin(w2*t) + c5*t"
    alpha = "c6*sin(w3*t) + c7"
    if shape == "legendre":
        l = "0"
    elif shape == "flat":
        m, n = "0", "0"
    elif shape == "constant":
        l, m, n, alpha = "c0", "c2", "c4", "c6"
    return (l, m, n, alpha), c
