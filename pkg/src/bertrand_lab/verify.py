"""Self-checks behind the CLI ``verify`` mode.

Each check compares library output with an independent reference (closed
forms, finite differences of constructed samples, or algebraic identities)
and returns a plain dictionary so it can go straight into a report.
"""

from __future__ import annotations

import math

import numpy as np

from .bertrand import Verdict, classify_bertrand_type
from .expr import CurveSpec
from .fixtures import (
    HELIX,
    circle,
    example_framed,
    random_curve,
    random_framed_curvature,
    spherical_legendre,
    straight_line_rotating,
)
from .framed import FramedInit, integrate_framed, recompute_curvature, singular_points, swap_frame
from .framed_mates import FramedPairKind, classify_framed
from .frenet import frenet_apparatus, frenet_residuals
from .geom import Grid
from .tolerances import DEFAULT, Tolerances

EQUIVALENT_KINDS = (("mu-nu2", "mu-nu1"), ("nu2-nu2", "nu2-nu1"), ("nu1-nu2", "nu1-nu1"))
IMPOSSIBLE_KINDS = ("t-t", "t-b", "b-t")


def _check(name: str, value: float, threshold: float, below: bool = True) -> dict:
    value = float(value)
    passed = value <= threshold if below else value >= threshold
    return {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}


def helix_checks(tol: Tolerances = DEFAULT) -> list[dict]:
    app = frenet_apparatus(HELIX, Grid.uniform(HELIX.t0, HELIX.t1, 512), tol)
    err = max(np.max(np.abs(app.kappa - 0.5)), np.max(np.abs(app.tau - 0.5)))
    res = frenet_residuals(app)[3:-3].max()
    return [_check("helix curvature and torsion", err, 1e-9), _check("helix Frenet-Serret residual", res, 1e-4)]


def circle_mate_check(tol: Tolerances = DEFAULT) -> dict:
    c = circle(2.0)
    app = frenet_apparatus(c, Grid.uniform(c.t0, c.t1, 256), tol)
    rep = classify_bertrand_type(app, "n-n", {"A": -1.0}, tol)
    err = max(np.max(np.abs(rep.kappa_bar - 1 / 3)), np.max(np.abs(rep.construction.mate_apparatus.kappa[3:-3] - 1 / 3)))
    return _check("planar Bertrand mate of the radius-2 circle", err, 1e-6)


def duality_check(tol: Tolerances = DEFAULT, n: int = 800) -> dict:
    e = CurveSpec("2*cos(t)", "sin(t)", "0", 0.2, 1.3)
    app = frenet_apparatus(e, Grid.uniform(e.t0, e.t1, n), tol)
    inv = classify_bertrand_type(app, "t-n", None, tol)
    ev = classify_bertrand_type(inv.construction.mate_apparatus, "n-t", None, tol)
    err = np.max(np.linalg.norm(ev.mate - app.gamma, axis=1))
    return _check("evolute of the involute of an ellipse arc", err, 1e-4)


def impossibility_fuzz(rng: np.random.Generator, count: int, tol: Tolerances = DEFAULT) -> dict:
    bad = 0
    for _ in range(count):
        spec, grid = random_curve(rng)
        app = frenet_apparatus(spec, grid, tol)
        bad += sum(classify_bertrand_type(app, k, None, tol).verdict is not Verdict.INFEASIBLE for k in IMPOSSIBLE_KINDS)
    return _check(f"impossible kinds stay Infeasible on {count} random curves", bad, 0)


def framed_example_checks(tol: Tolerances = DEFAULT) -> list[dict]:
    from .fixtures import EXAMPLE_CURVATURE, example_constants, example_init, periodic_grid

    fc = integrate_framed(EXAMPLE_CURVATURE, example_init(), periodic_grid(1024), example_constants())
    sl = slice(3, -3)
    trip = np.abs(recompute_curvature(fc).as_array()[:, sl] - fc.curvature.as_array()[:, sl]).max()
    muz = np.max(np.abs(fc.mu[:, 2] - 1 / math.sqrt(2)))
    found = singular_points(fc, tol, alpha=fc.curvature.alpha)
    expected = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    sing = max(abs(a - b) for a, b in zip(found, expected)) if len(found) == 4 else math.inf
    return [
        _check("framed example round trip", trip, 1e-5),
        _check("framed example mu z-component", muz, 1e-6),
        _check("framed example singular points", sing, 1e-6),
    ]


def framed_mate_checks(tol: Tolerances = DEFAULT) -> list[dict]:
    fc = example_framed(1024)
    worst = 0.0
    infeasible = []
    for kind in FramedPairKind:
        rep = classify_framed(fc, kind, None, tol)
        if rep.verdict is Verdict.FEASIBLE:
            worst = max(worst, rep.residuals["curvature"])
        else:
            infeasible.append(kind.value)
    return [
        _check("framed mate curvature against finite differences", worst, 1e-4),
        _check("framed example kinds without a mate (mu-mu expected)", len(infeasible), 1),
    ]


def equivalence_fuzz(rng: np.random.Generator, count: int, tol: Tolerances = DEFAULT) -> dict:
    mismatches = 0
    init = FramedInit.from_flat([1, 0, 0, 0, 1, 0, 0, 0, 0])
    for _ in range(count):
        exprs, consts = random_framed_curvature(rng)
        fc = integrate_framed(exprs, init, Grid.uniform(0.0, 3.0, 301), consts)
        for a, b in EQUIVALENT_KINDS:
            va = classify_framed(fc, a, None, tol, construct=False).verdict
            vb = classify_framed(fc, b, None, tol, construct=False).verdict
            mismatches += va is not vb
    return _check(f"equivalent framed kinds agree on {count} random quadruples", mismatches, 0)


def swap_checks() -> dict:
    worst = 0.0
    for fc in (example_framed(1024), spherical_legendre(), straight_line_rotating()):
        a = recompute_curvature(swap_frame(fc)).as_array()
        b = recompute_curvature(fc).swapped().as_array()
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _check("swapped frame curvature identity", worst, 1e-8)


def run_checks(tol: Tolerances = DEFAULT, seed: int = 0, fuzz_curves: int = 20, fuzz_framed: int = 10) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = helix_checks(tol)
    checks.append(circle_mate_check(tol))
    checks.append(duality_check(tol))
    checks.append(impossibility_fuzz(rng, fuzz_curves, tol))
    checks += framed_example_checks(tol)
    checks += framed_mate_checks(tol)
    checks.append(equivalence_fuzz(rng, fuzz_framed, tol))
    checks.append(swap_checks())
    return checks
