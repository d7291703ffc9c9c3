"""Bertrand, Mannheim and Bertrand-type mates of regular space curves.

A (v, w)-mate of gamma is gamma_bar = gamma + lambda v where the w-line of
gamma_bar coincides with the v-line of gamma at corresponding points. Every
classifier here works on a sampled Apparatus and, when it says Feasible,
builds the mate and checks the line coincidence with an independent
finite-difference Frenet computation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    Degenerate,
    DegenerateInput,
    DivisionByZeroDomain,
    NoFeasibleConstant,
    NotRegular,
    VerificationFailed,
)
from .frenet import Apparatus, apparatus_from_samples
from .geom import cross, dot, norm
from .numerics import max_abs, rel_error
from .tolerances import DEFAULT, Tolerances

INTERIOR = 3  # samples dropped at each end when comparing against finite differences


class Verdict(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    IDENTICALLY_SATISFIED = "IdenticallySatisfied"


class PairKind(str, enum.Enum):
    """Ordered pair (v, w_bar) of Frenet lines; the value is the CLI spelling."""

    TT = "t-t"
    TN = "t-n"
    TB = "t-b"
    NT = "n-t"
    NN = "n-n"
    NB = "n-b"
    BT = "b-t"
    BN = "b-n"
    BB = "b-b"

    @property
    def v(self) -> str:
        return self.value[0].upper()

    @property
    def w(self) -> str:
        return self.value[2].upper()

    @classmethod
    def parse(cls, text: str) -> "PairKind":
        key = text.strip().lower().replace(",", "-").replace(" ", "")
        if len(key) == 2:
            key = f"{key[0]}-{key[1]}"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown pair kind {text!r}; expected one of {[k.value for k in cls]}") from None


IMPOSSIBLE = {
    PairKind.TT: "tangent lines of distinct mates cannot coincide",
    PairKind.TB: "a tangent line can never be the binormal line of the mate",
    PairKind.BT: "a binormal line can never be the tangent line of the mate",
}


@dataclass(frozen=True)
class BertrandConstants:
    A: float
    B: float
    unique: bool
    residual: float
    min_norm: tuple[float, float] | None = None


@dataclass(frozen=True, eq=False)
class MateConstruction:
    offset: np.ndarray  # lambda at every sample
    mate: np.ndarray  # gamma_bar samples
    mate_apparatus: Apparatus  # finite-difference apparatus of gamma_bar
    line_residual: float  # max |(gamma_bar - gamma) x v| / |gamma_bar - gamma|
    frame_residual: float  # max |w_bar x v|
    worst_param: float
    sign: float  # sign of w_bar . v, when it is constant (0 if it flips)


@dataclass(eq=False)
class MateReport:
    kind: PairKind
    verdict: Verdict
    reason: str = ""
    constants: dict = field(default_factory=dict)
    fit_residual: float | None = None
    construction: MateConstruction | None = None
    kappa_bar: np.ndarray | None = None
    tau_bar: np.ndarray | None = None
    curvature_residual: float | None = None
    curvature_worst_param: float | None = None

    @property
    def offset(self):
        return None if self.construction is None else self.construction.offset

    @property
    def mate(self):
        return None if self.construction is None else self.construction.mate

    @property
    def line_residual(self) -> float | None:
        return None if self.construction is None else self.construction.line_residual

    @property
    def frame_residual(self) -> float | None:
        return None if self.construction is None else self.construction.frame_residual


# -- helpers ------------------------------------------------------------------


def _scale(app: Apparatus) -> float:
    return max(float(app.kappa.max()), max_abs(app.tau))


def tau_vanishes(app: Apparatus, tol: Tolerances = DEFAULT) -> bool:
    """Scale-aware test for tau identically zero."""
    return max_abs(app.tau) < tol.zero * float(app.kappa.max())


def arc_parameter(app: Apparatus) -> np.ndarray:
    """Arc length values: the parameter itself when the input is unit speed."""
    if np.allclose(app.speed, 1.0, rtol=0, atol=1e-8):
        return app.param
    return app.s


def vanishing_index(x: np.ndarray, threshold: float) -> int | None:
    """Index where a sampled factor vanishes: |x| <= threshold at a sample, or
    a sign change between neighbours (then the sample nearer zero)."""
    x = np.asarray(x, float)
    ax = np.abs(x)
    i = int(np.argmin(ax))
    if ax[i] <= threshold:
        return i
    flips = np.flatnonzero(np.sign(x[:-1]) != np.sign(x[1:]))
    if flips.size:
        j = int(flips[0])
        return j if ax[j] <= ax[j + 1] else j + 1
    return None


def _fit_budget(app: Apparatus, tol: Tolerances) -> float:
    return tol.fit * np.sqrt(len(app))


# -- classical Bertrand ---------------------------------------------------------


def fit_bertrand(app: Apparatus, tol: Tolerances = DEFAULT) -> BertrandConstants:
    """Least-squares A kappa + B tau = 1; re-selects along the solution line if needed."""
    k, tq = app.kappa, app.tau
    design = np.column_stack([k, tq])
    sol, _, rank, sv = np.linalg.lstsq(design, np.ones(len(k)), rcond=1e-10)
    A, B = float(sol[0]), float(sol[1])
    unique = bool(rank == 2)
    min_norm = None
    if not unique:
        # both columns proportional: kappa and tau constant multiples of each other
        min_norm = (A, B)
        k0 = float(np.mean(k))
        A, B = 1.0 / k0, 0.0
    residual = max_abs(A * k + B * tq - 1.0)
    return BertrandConstants(A, B, unique, residual, min_norm)


def classify_bertrand(
    app: Apparatus, tol: Tolerances = DEFAULT, construct: bool = True, params: dict | None = None
) -> MateReport:
    """(n, n_bar) verdict. On a planar curve any offset A with 1 - A kappa != 0
    works; ``params["A"]`` picks it, else A = -1/min kappa."""
    kind = PairKind.NN
    _require_nondegenerate(app)
    if tau_vanishes(app, tol):
        lam = float((params or {}).get("A", -1.0 / float(app.kappa.min())))
        if lam == 0:
            raise NoFeasibleConstant("the normal offset must be non-zero")
        rep = MateReport(
            kind,
            Verdict.IDENTICALLY_SATISFIED,
            "planar curve: every admissible constant offset along n gives a mate",
            {"A": lam, "branch": "planar"},
        )
        return _finish(app, rep, construct, tol)
    fit = fit_bertrand(app, tol)
    consts = {"A": fit.A, "B": fit.B, "unique": fit.unique, "branch": "generic"}
    if fit.min_norm is not None:
        consts["min_norm_A"], consts["min_norm_B"] = fit.min_norm
    if fit.residual >= _fit_budget(app, tol):
        return MateReport(kind, Verdict.INFEASIBLE, "no constants with A kappa + B tau = 1", consts, fit.residual)
    i = vanishing_index(app.tau * (fit.B * app.kappa - fit.A * app.tau), tol.deg * _scale(app))
    if i is not None:
        return MateReport(
            kind,
            Verdict.INFEASIBLE,
            f"tau (B kappa - A tau) vanishes at parameter {float(app.param[i])!r}",
            consts,
            fit.residual,
        )
    rep = MateReport(kind, Verdict.FEASIBLE, "", consts, fit.residual)
    return _finish(app, rep, construct, tol)


def bertrand_mate_curvature(kappa, tau, A: float, B: float = 0.0, branch: str = "generic", param=None):
    """Curvature and torsion of the Bertrand mate gamma + A n."""
    kappa = np.asarray(kappa, float)
    tau = np.asarray(tau, float)
    param = np.arange(kappa.size, dtype=float) if param is None else np.asarray(param, float)
    if branch == "generic":
        _nonzero(tau, param, "tau")
        c = A * A + B * B
        return np.abs(B * kappa - A * tau) / (c * np.abs(tau)), 1.0 / (c * tau)
    if branch == "planar":
        d = 1.0 - A * kappa
        _nonzero(d, param, "1 - A kappa")
        return kappa / np.abs(d), np.zeros_like(kappa)
    raise ValueError(f"unknown branch {branch!r}")


def _nonzero(x: np.ndarray, param: np.ndarray, what: str, eps: float = 1e-12) -> None:
    x = np.broadcast_to(x, param.shape)
    bad = np.abs(x) <= eps
    if np.any(bad):
        raise DivisionByZeroDomain(float(param[np.flatnonzero(bad)[0]]), what)


# -- Mannheim -------------------------------------------------------------------


def classify_mannheim(app: Apparatus, tol: Tolerances = DEFAULT, construct: bool = True) -> MateReport:
    kind = PairKind.NB
    _require_nondegenerate(app)
    k, tq = app.kappa, app.tau
    q = k * k + tq * tq
    A = float(np.sum(k * q) / np.sum(q * q))
    resid = max_abs(A * q - k)
    consts = {"A": A}
    if tau_vanishes(app, tol):
        return MateReport(kind, Verdict.INFEASIBLE, "tau vanishes identically", consts, resid)
    if resid >= _fit_budget(app, tol):
        return MateReport(kind, Verdict.INFEASIBLE, "no constant with A (kappa^2 + tau^2) = kappa", consts, resid)
    w = k * app.tau_prime - app.kappa_prime * tq
    i = vanishing_index(tq * w, tol.deg * _scale(app) ** 4)
    if i is not None:
        return MateReport(
            kind,
            Verdict.INFEASIBLE,
            f"tau (kappa tau' - kappa' tau) vanishes at parameter {float(app.param[i])!r}",
            consts,
            resid,
        )
    rep = MateReport(kind, Verdict.FEASIBLE, "", consts, resid)
    return _finish(app, rep, construct, tol)


def mannheim_mate_curvature(kappa, tau, A: float, kappa_prime, tau_prime, param=None):
    """Curvature and torsion of the Mannheim mate gamma + A n."""
    kappa, tau = np.asarray(kappa, float), np.asarray(tau, float)
    kp, tp = np.asarray(kappa_prime, float), np.asarray(tau_prime, float)
    param = np.arange(kappa.size, dtype=float) if param is None else np.asarray(param, float)
    _nonzero(tau, param, "tau")
    if A == 0:
        raise DivisionByZeroDomain(float(param[0]), "A")
    q = tau * tau + kappa * kappa
    kbar = kappa * np.abs(kappa * tp - kp * tau) / (np.abs(A * tau) * q**1.5)
    return kbar, q / tau


# -- Bertrand-type pairs --------------------------------------------------------


def _bn_objective(app: Apparatus, tp: np.ndarray):
    k, tq = app.kappa, app.tau

    def f(A):
        A = np.asarray(A, float)[..., None]
        return np.max(np.abs(A * tp - k * (A * A * tq * tq + 1.0)), axis=-1)

    return f


def fit_bn_constant(app: Apparatus) -> tuple[float, float]:
    """Constant A minimising max |A tau' - kappa (A^2 tau^2 + 1)|: log scan, then golden section."""
    tp = app.tau_prime
    f = _bn_objective(app, tp)
    mags = np.logspace(-3, 3, 241)
    cand = np.concatenate([-mags[::-1], mags])
    vals = f(cand)
    i = int(np.argmin(vals))
    lo = cand[max(i - 1, 0)]
    hi = cand[min(i + 1, len(cand) - 1)]
    if lo < 0 < hi:
        lo, hi = (cand[i], hi) if cand[i] > 0 else (lo, cand[i])
    best_A, best_f = float(cand[i]), float(vals[i])
    if lo != hi:
        res = minimize_scalar(lambda a: float(f(a)), bounds=(min(lo, hi), max(lo, hi)), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < best_f:
            best_A, best_f = float(res.x), float(res.fun)
    return best_A, best_f


def classify_bertrand_type(
    app: Apparatus,
    kind: "PairKind | str",
    params: dict | None = None,
    tol: Tolerances = DEFAULT,
    construct: bool = True,
) -> MateReport:
    kind = PairKind.parse(kind) if isinstance(kind, str) else kind
    params = dict(params or {})
    _require_nondegenerate(app)
    if kind in IMPOSSIBLE:
        return MateReport(kind, Verdict.INFEASIBLE, IMPOSSIBLE[kind])
    if kind is PairKind.NN:
        return classify_bertrand(app, tol, construct, params)
    if kind is PairKind.NB:
        return classify_mannheim(app, tol, construct)
    planar = tau_vanishes(app, tol)
    s = arc_parameter(app)
    if kind is PairKind.TN:
        span = float(s[-1] - s[0])
        c = float(params.get("c", s[-1] + 0.1 * span))
        if not planar:
            return MateReport(kind, Verdict.INFEASIBLE, "tau does not vanish identically", {"c": c})
        gap = np.abs(c - s)
        if gap.min() <= tol.nonzero * max(1.0, span):
            i = int(np.argmin(gap))
            return MateReport(kind, Verdict.INFEASIBLE, f"c - s vanishes at parameter {float(app.param[i])!r}", {"c": c})
        return _finish(app, MateReport(kind, Verdict.FEASIBLE, "", {"c": c}), construct, tol)
    if kind is PairKind.NT:
        if not planar:
            return MateReport(kind, Verdict.INFEASIBLE, "tau does not vanish identically")
        i = vanishing_index(app.kappa_prime, tol.deg * float(app.kappa.max()) ** 2)
        if i is not None:
            return MateReport(kind, Verdict.INFEASIBLE, f"kappa' vanishes at parameter {float(app.param[i])!r}")
        return _finish(app, MateReport(kind, Verdict.FEASIBLE), construct, tol)
    if kind is PairKind.BN:
        i = int(np.argmin(np.abs(app.tau)))
        if abs(app.tau[i]) <= tol.zero * _scale(app):
            return MateReport(kind, Verdict.INFEASIBLE, f"tau vanishes at parameter {float(app.param[i])!r}")
        if "A" in params:
            A = float(params["A"])
            resid = float(_bn_objective(app, app.tau_prime)(A))
        else:
            A, resid = fit_bn_constant(app)
        consts = {"A": A}
        if resid >= _fit_budget(app, tol):
            return MateReport(kind, Verdict.INFEASIBLE, "no constant with A tau' = kappa (A^2 tau^2 + 1)", consts, resid)
        return _finish(app, MateReport(kind, Verdict.FEASIBLE, "", consts, resid), construct, tol)
    # (b, b_bar)
    A = float(params.get("A", 1.0))
    if not planar:
        return MateReport(kind, Verdict.INFEASIBLE, "tau does not vanish identically", {"A": A})
    if A == 0:
        raise NoFeasibleConstant("the binormal offset must be non-zero")
    return _finish(app, MateReport(kind, Verdict.FEASIBLE, "", {"A": A}), construct, tol)


def _require_nondegenerate(app: Apparatus) -> None:
    if len(app) < 8:
        raise DegenerateInput("apparatus needs at least 8 samples")
    if not np.all(np.isfinite(app.kappa)) or not np.all(np.isfinite(app.tau)):
        raise DegenerateInput("non-finite curvature samples")
    if np.any(app.kappa <= 0):
        i = int(np.argmin(app.kappa))
        raise DegenerateInput(f"curvature vanishes at parameter {float(app.param[i])!r}")


# -- mate construction ---------------------------------------------------------


def mate_offset(app: Apparatus, kind: PairKind, constants: dict) -> np.ndarray:
    """lambda(s) such that the mate is gamma + lambda v."""
    n = len(app)
    if kind in (PairKind.NN, PairKind.NB, PairKind.BN, PairKind.BB):
        return np.full(n, float(constants["A"]))
    if kind is PairKind.TN:
        return float(constants["c"]) - arc_parameter(app)
    if kind is PairKind.NT:
        return 1.0 / app.kappa
    raise NoFeasibleConstant(f"{kind.value}: no mate exists")


def construct_mate(
    app: Apparatus,
    kind: "PairKind | str",
    constants: dict,
    tol: Tolerances = DEFAULT,
) -> MateConstruction:
    """Build gamma_bar = gamma + lambda v and verify both line conditions."""
    kind = PairKind.parse(kind) if isinstance(kind, str) else kind
    lam = mate_offset(app, kind, constants)
    v = app.frame(kind.v)
    scale = float(norm(app.gamma).max()) or 1.0
    if max_abs(lam) <= tol.nonzero * scale:
        raise VerificationFailed("offset vanishes identically", float(app.param[0]), max_abs(lam))
    mate = app.gamma + lam[:, None] * v
    diff = mate - app.gamma
    dn = norm(diff)
    safe = np.where(dn > 0, dn, 1.0)
    line = np.where(dn > 0, norm(cross(diff, v)) / safe, 0.0)
    try:
        mapp = apparatus_from_samples(app.param, mate, tol)
    except (Degenerate, NotRegular) as err:
        raise VerificationFailed(f"{kind.value} mate is not a non-degenerate curve: {err}", err.param) from err
    w = mapp.frame(kind.w)
    frame = norm(cross(w, v))
    i = int(np.argmax(frame))
    if line.max() >= tol.line:
        j = int(np.argmax(line))
        raise VerificationFailed(f"{kind.value}: mate offset leaves the {kind.v} line", float(app.param[j]), float(line[j]))
    if frame[i] >= tol.line:
        raise VerificationFailed(
            f"{kind.value}: mate {kind.w} line differs from base {kind.v} line", float(app.param[i]), float(frame[i])
        )
    sgn = np.sign(dot(w, v))
    sign = float(sgn[0]) if np.all(sgn == sgn[0]) else 0.0
    return MateConstruction(lam, mate, mapp, float(line.max()), float(frame.max()), float(app.param[i]), sign)


def mate_curvature(app: Apparatus, kind: "PairKind | str", constants: dict) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form curvature and torsion of the mate, from the base apparatus."""
    kind = PairKind.parse(kind) if isinstance(kind, str) else kind
    k, tq, p = app.kappa, app.tau, app.param
    if kind is PairKind.NN:
        return bertrand_mate_curvature(k, tq, constants["A"], constants.get("B", 0.0), constants.get("branch", "generic"), p)
    if kind is PairKind.NB:
        return mannheim_mate_curvature(k, tq, constants["A"], app.kappa_prime, app.tau_prime, p)
    if kind is PairKind.TN:
        gap = float(constants["c"]) - arc_parameter(app)
        _nonzero(gap, p, "c - s")
        return 1.0 / np.abs(gap), np.zeros_like(k)
    if kind is PairKind.NT:
        kp = app.kappa_prime
        _nonzero(kp, p, "kappa'")
        return k**3 / np.abs(kp), np.zeros_like(k)
    if kind is PairKind.BN:
        A = float(constants["A"])
        d = 1.0 + A * A * tq * tq
        return np.abs(A) * tq * tq / d, tq / d
    if kind is PairKind.BB:
        return k.copy(), np.zeros_like(k)
    raise NoFeasibleConstant(f"{kind.value}: no mate exists")


def _finish(app: Apparatus, rep: MateReport, construct: bool, tol: Tolerances) -> MateReport:
    if not construct:
        return rep
    rep.construction = construct_mate(app, rep.kind, rep.constants, tol)
    kb, tb = mate_curvature(app, rep.kind, rep.constants)
    rep.kappa_bar, rep.tau_bar = kb, tb
    m = rep.construction.mate_apparatus
    sl = slice(INTERIOR, len(app) - INTERIOR)
    err = np.maximum(rel_error(kb[sl], m.kappa[sl]), rel_error(tb[sl], m.tau[sl]))
    i = int(np.argmax(err))
    rep.curvature_residual = float(err[i])
    rep.curvature_worst_param = float(app.param[sl][i])
    return rep
