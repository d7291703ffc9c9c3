"""Bertrand-type mates of framed curves.

A (v, w)-mate of (gamma, nu1, nu2) is a framed curve with
gamma_bar = gamma + lambda v whose frame vector w_bar equals v. Each of the
nine kinds has its own existence condition; the classifiers decide it on
samples, return a witness (lambda, theta) and, on request, build the mate
and compare the closed-form mate curvature against finite differences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .bertrand import Verdict
from .errors import DegenerateInput, VerificationFailed
from .framed import (
    FramedCurvature,
    FramedCurve,
    curvature_of,
    recompute_curvature,
    swap_frame,
)
from .geom import norm
from .numerics import cumulative_integral, cumulative_trapezoid, derivative, max_abs, unwrap_period
from .tolerances import DEFAULT, Tolerances

INTERIOR = 3
MAX_THETA_STEP = math.pi / 4  # larger jumps between samples mean theta is not smooth
LAMBDA_SCAN = tuple(
    sign * mag for mag in np.concatenate([[1.0], np.logspace(-3, 3, 13)]) for sign in (1.0, -1.0)
)
MIN_DENOMINATOR = 1e-3  # relative size below which -alpha/m is interpolated instead


class FramedPairKind(str, enum.Enum):
    NU1_NU1 = "nu1-nu1"
    NU1_NU2 = "nu1-nu2"
    NU1_MU = "nu1-mu"
    NU2_NU1 = "nu2-nu1"
    NU2_NU2 = "nu2-nu2"
    NU2_MU = "nu2-mu"
    MU_NU1 = "mu-nu1"
    MU_NU2 = "mu-nu2"
    MU_MU = "mu-mu"

    @property
    def v(self) -> str:
        return self.value.split("-")[0]

    @property
    def w(self) -> str:
        return self.value.split("-")[1]

    @classmethod
    def parse(cls, text: str) -> "FramedPairKind":
        key = text.strip().lower().replace(",", "-").replace("_", "-").replace(" ", "")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown framed pair kind {text!r}; expected one of {[k.value for k in cls]}") from None


# kinds whose mate is the frame swap of another kind's mate, and the angle map
SWAPPED = {
    FramedPairKind.NU1_NU2: (FramedPairKind.NU1_NU1, lambda th: th - math.pi / 2),
    FramedPairKind.NU2_NU2: (FramedPairKind.NU2_NU1, lambda th: th - math.pi / 2),
    FramedPairKind.MU_NU2: (FramedPairKind.MU_NU1, lambda th: -th),
}


@dataclass(eq=False)
class Witness:
    lam: np.ndarray  # lambda at every sample (constant kinds repeat the value)
    theta: np.ndarray
    lam_constant: float | None = None


@dataclass(eq=False)
class FramedMateReport:
    kind: FramedPairKind
    verdict: Verdict
    reason: str = ""
    witness: Witness | None = None
    mate: FramedCurve | None = None
    mate_curvature: FramedCurvature | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def theta(self):
        return None if self.witness is None else self.witness.theta

    @property
    def lam(self):
        return None if self.witness is None else self.witness.lam


# -- decision helpers ----------------------------------------------------------


def _scale(c: FramedCurvature) -> float:
    s = c.scale
    return s if s > 0 else 1.0


def vanishes(x: np.ndarray, scale: float, tol: Tolerances = DEFAULT) -> bool:
    return max_abs(x) <= tol.zero * scale


def solve_angle(P: np.ndarray, Q: np.ndarray, scale: float, tol: Tolerances = DEFAULT) -> tuple[np.ndarray, float]:
    """Smooth theta with P cos(theta) + Q sin(theta) = 0.

    Pointwise theta = atan2(P, -Q); values within noise of zero are snapped
    to zero first, and where both vanish the previous angle is kept. The
    equation only fixes theta modulo pi, so unwrapping is done with that
    period. Returns theta and the largest step between samples.
    """
    P = np.where(np.abs(P) <= tol.zero * scale, 0.0, P)
    Q = np.where(np.abs(Q) <= tol.zero * scale, 0.0, Q)
    raw = np.arctan2(P, -Q)
    free = (P == 0) & (Q == 0)
    if free.all():
        return np.zeros_like(raw), 0.0
    first = int(np.argmax(~free))
    raw[:first] = raw[first]
    for i in range(first + 1, len(raw)):
        if free[i]:
            raw[i] = raw[i - 1]
    theta = unwrap_period(raw, math.pi)
    # shift into (-pi/2, pi/2] at the anchor for reproducibility
    theta -= math.pi * np.round(theta[0] / math.pi)
    step = float(np.max(np.abs(np.diff(theta)))) if len(theta) > 1 else 0.0
    return theta, step


def _condition(kind: FramedPairKind, c: FramedCurvature, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """(P, Q) of the angle condition P cos(theta) + Q sin(theta) = 0."""
    l, m, n, a = c.l, c.m, c.n, c.alpha
    if kind is FramedPairKind.NU1_NU1:
        return lam * l, -(a + lam * m)
    if kind is FramedPairKind.NU1_NU2:
        return a + lam * m, lam * l
    if kind is FramedPairKind.NU2_NU1:
        return a + lam * n, lam * l
    if kind is FramedPairKind.NU2_NU2:
        return -lam * l, a + lam * n
    if kind is FramedPairKind.MU_NU1:
        return m, -n
    if kind is FramedPairKind.MU_NU2:
        return m, n
    raise ValueError(kind)


def _interp_quotient(num: np.ndarray, den: np.ndarray, t: np.ndarray) -> np.ndarray:
    """-num/den, with a cubic spline over the well-conditioned samples elsewhere."""
    good = np.abs(den) > MIN_DENOMINATOR * max_abs(den)
    q = np.zeros_like(num)
    q[good] = -num[good] / den[good]
    if (~good).any() and good.sum() >= 4:
        q[~good] = CubicSpline(t[good], q[good])(t[~good])
    return q


# -- classification -------------------------------------------------------------


def classify_framed(
    fc: FramedCurve,
    kind: "FramedPairKind | str",
    params: dict | None = None,
    tol: Tolerances = DEFAULT,
    construct: bool = True,
) -> FramedMateReport:
    """Decide whether ``fc`` admits a ``kind`` mate and return a witness."""
    kind = FramedPairKind.parse(kind) if isinstance(kind, str) else kind
    params = dict(params or {})
    if len(fc.param) < 8:
        raise DegenerateInput("framed curve needs at least 8 samples")
    c = curvature_of(fc)
    if not np.all(np.isfinite(c.as_array())):
        raise DegenerateInput("non-finite curvature samples")
    scale = _scale(c)
    t = fc.param
    rep = FramedMateReport(kind, Verdict.INFEASIBLE)

    if kind in (FramedPairKind.NU1_NU1, FramedPairKind.NU1_NU2, FramedPairKind.NU2_NU1, FramedPairKind.NU2_NU2):
        candidates = [float(params["lambda"])] if "lambda" in params else list(LAMBDA_SCAN)
        best = None
        for lam in candidates:
            if lam == 0:
                continue
            theta, step = solve_angle(*_condition(kind, c, lam), scale, tol)
            if best is None or step < best[2]:
                best = (lam, theta, step)
            if step <= MAX_THETA_STEP:
                break
        lam, theta, step = best
        rep.residuals["theta_step"] = step
        if step > MAX_THETA_STEP:
            rep.reason = "no constant lambda admits a smooth angle"
            return rep
        rep.verdict = Verdict.FEASIBLE
        rep.witness = Witness(np.full(len(t), lam), theta, lam)
    elif kind in (FramedPairKind.MU_NU1, FramedPairKind.MU_NU2):
        Lam = cumulative_trapezoid(c.alpha, t) + float(params.get("integration_constant", 0.0))
        if max_abs(Lam) <= tol.nonzero * scale * max(1.0, float(t[-1] - t[0])):
            rep.reason = "the integral of alpha vanishes identically"
            return rep
        theta, step = solve_angle(*_condition(kind, c, 0.0), scale, tol)
        rep.residuals["theta_step"] = step
        if step > MAX_THETA_STEP:
            rep.reason = "no smooth angle solves the condition on (m, n)"
            return rep
        Lam = cumulative_integral(c.alpha, t, float(params.get("integration_constant", 0.0)))
        rep.verdict = Verdict.FEASIBLE
        rep.witness = Witness(Lam, theta)
    elif kind is FramedPairKind.MU_MU:
        if not (vanishes(c.m, scale, tol) and vanishes(c.n, scale, tol)):
            rep.reason = "m and n do not both vanish identically"
            return rep
        lam = float(params.get("lambda", 1.0))
        theta = np.full(len(t), float(params.get("theta", 0.0)))
        rep.verdict = Verdict.FEASIBLE
        rep.witness = Witness(np.full(len(t), lam), theta, lam)
    else:  # nu1-mu, nu2-mu
        if not vanishes(c.l, scale, tol):
            rep.reason = "l does not vanish identically"
            return rep
        den = c.m if kind is FramedPairKind.NU1_MU else c.n
        if "lambda" in params:
            lam = np.broadcast_to(np.asarray(params["lambda"], float), t.shape).copy()
        else:
            lam = _interp_quotient(c.alpha, den, t)
        prod = np.abs(c.alpha + lam * den)
        rep.residuals["product"] = float(prod.max())
        if prod.max() > tol.zero * scale * max(1.0, max_abs(lam)):
            i = int(np.argmax(prod))
            rep.reason = f"alpha + lambda {'m' if kind is FramedPairKind.NU1_MU else 'n'} does not vanish (worst t={float(t[i])!r})"
            return rep
        theta = np.full(len(t), float(params.get("theta", 0.0)))
        rep.verdict = Verdict.FEASIBLE
        rep.witness = Witness(lam, theta)

    if construct:
        construct_framed_mate(fc, kind, rep.witness, tol, report=rep)
    return rep


# -- construction -----------------------------------------------------------------


def _base_mate(fc: FramedCurve, kind: FramedPairKind, w: Witness) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    g, v1, v2, mu = fc.gamma, fc.nu1, fc.nu2, fc.mu
    lam = w.lam[:, None]
    c = np.cos(w.theta)[:, None]
    s = np.sin(w.theta)[:, None]
    if kind is FramedPairKind.NU1_NU1:
        return g + lam * v1, v1.copy(), c * v2 - s * mu
    if kind is FramedPairKind.NU2_NU1:
        return g + lam * v2, v2.copy(), c * mu - s * v1
    if kind is FramedPairKind.MU_NU1:
        return g - lam * mu, mu.copy(), c * v1 - s * v2
    if kind is FramedPairKind.MU_MU:
        return g + lam * mu, c * v1 - s * v2, s * v1 + c * v2
    if kind is FramedPairKind.NU1_MU:
        return g + lam * v1, c * v2 - s * mu, s * v2 + c * mu
    if kind is FramedPairKind.NU2_MU:
        return g + lam * v2, c * mu - s * v1, s * mu + c * v1
    raise ValueError(kind)


def _base_witness(kind: FramedPairKind, w: Witness) -> tuple[FramedPairKind, Witness]:
    if kind in SWAPPED:
        base, angle = SWAPPED[kind]
        return base, Witness(w.lam, angle(w.theta), w.lam_constant)
    return kind, w


def construct_framed_mate(
    fc: FramedCurve,
    kind: "FramedPairKind | str",
    witness: Witness,
    tol: Tolerances = DEFAULT,
    report: FramedMateReport | None = None,
) -> FramedMateReport:
    """Build the mate from a witness and verify it is a framed curve with w_bar = v."""
    kind = FramedPairKind.parse(kind) if isinstance(kind, str) else kind
    rep = report or FramedMateReport(kind, Verdict.FEASIBLE, witness=witness)
    gscale = float(norm(fc.gamma).max()) or 1.0
    lam = np.asarray(witness.lam, float)
    if max_abs(lam) <= tol.nonzero * gscale:
        raise VerificationFailed("lambda vanishes identically", float(fc.param[0]), max_abs(lam))
    base, bw = _base_witness(kind, witness)
    g, n1, n2 = _base_mate(fc, base, bw)
    mate = FramedCurve(fc.grid, g, n1, n2)
    if kind in SWAPPED:
        mate = swap_frame(mate)
    copied = float(np.max(np.abs(mate.vector(kind.w) - fc.vector(kind.v))))
    defect = mate.delta_defect()
    ortho = mate.frame_residual(float(norm(derivative(fc.gamma, fc.param)).max()))
    rep.residuals.update({"w_equals_v": copied, "delta_defect": defect, "frame_orthogonality": ortho})
    if copied > 1e-12:
        raise VerificationFailed(f"{kind.value}: mate {kind.w} differs from base {kind.v}", None, copied)
    if defect > 1e-10:
        raise VerificationFailed(f"{kind.value}: mate frame left Delta", None, defect)
    if ortho > tol.frame:
        dg = derivative(mate.gamma, mate.param)
        r = np.maximum(np.abs(np.sum(dg * mate.nu1, -1)), np.abs(np.sum(dg * mate.nu2, -1)))
        i = int(np.argmax(r))
        raise VerificationFailed(f"{kind.value}: mate is not a framed curve", float(fc.param[i]), ortho)
    curv = framed_mate_curvature(fc, kind, witness)
    mate = FramedCurve(fc.grid, mate.gamma, mate.nu1, mate.nu2, curv)
    oracle = recompute_curvature(mate)
    sl = slice(INTERIOR, len(fc.param) - INTERIOR)
    rep.residuals["curvature"] = curv.deviation(oracle, sl)
    rep.mate = mate
    rep.mate_curvature = curv
    return rep


# -- mate curvature ----------------------------------------------------------------


def _base_curvature(fc: FramedCurve, kind: FramedPairKind, w: Witness) -> FramedCurvature:
    c = curvature_of(fc)
    t = fc.param
    l, m, n, a = c.l, c.m, c.n, c.alpha
    th = w.theta
    dth = derivative(th, t)
    lam = w.lam
    cs, sn = np.cos(th), np.sin(th)
    if kind is FramedPairKind.NU1_NU1:
        return FramedCurvature(t, l * cs - m * sn, l * sn + m * cs, n - dth, lam * l * sn + (a + lam * m) * cs)
    if kind is FramedPairKind.NU2_NU1:
        return FramedCurvature(t, l * sn + n * cs, -l * cs + n * sn, -dth - m, (a + lam * n) * sn - lam * l * cs)
    if kind is FramedPairKind.MU_NU1:
        return FramedCurvature(t, -m * cs + n * sn, -m * sn - n * cs, l - dth, lam * (m * sn + n * cs))
    if kind is FramedPairKind.MU_MU:
        return FramedCurvature(t, l - dth, np.zeros_like(t), np.zeros_like(t), a + derivative(lam, t))
    if kind is FramedPairKind.NU1_MU:
        return FramedCurvature(t, n - dth, m * sn, -m * cs, derivative(lam, t))
    if kind is FramedPairKind.NU2_MU:
        return FramedCurvature(t, -dth - m, -n * cs, -n * sn, derivative(lam, t))
    raise ValueError(kind)


def framed_mate_curvature(fc: FramedCurve, kind: "FramedPairKind | str", witness: Witness) -> FramedCurvature:
    """Closed-form curvature of the mate; swapped kinds use (-l, -n, -m, -alpha)."""
    kind = FramedPairKind.parse(kind) if isinstance(kind, str) else kind
    base, bw = _base_witness(kind, witness)
    curv = _base_curvature(fc, base, bw)
    return curv.swapped() if kind in SWAPPED else curv
