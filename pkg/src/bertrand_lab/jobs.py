"""Job documents: validation, execution and report assembly.

A job is one JSON document (see ``job_schema.json``). ``run_job`` turns it
into a report dictionary plus an optional sample table; the CLI decides
where those go. Nothing here depends on time, randomness without a seed, or
dictionary ordering, so identical jobs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Any

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__
from .bertrand import PairKind, Verdict, classify_bertrand_type
from .errors import BertrandLabError, ExprSyntaxError, SpecValidationError
from .expr import CurveSpec, parse
from .framed import FramedCurve, FramedInit, integrate_framed, recompute_curvature, singular_points
from .framed_mates import FramedPairKind, classify_framed
from .frenet import Apparatus, FrenetInit, frenet_apparatus, frenet_residuals, integrate_frenet
from .geom import Grid
from .numerics import cumulative_integral
from .tolerances import DEFAULT, Tolerances

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
INTERIOR = 3


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("job_schema.json").read_text("utf-8"))


_VALIDATOR = Draft202012Validator(load_schema())


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_job(job: Any) -> dict:
    """Schema check followed by semantic checks; raises SpecValidationError.

    The error names the offending field as a JSONPath-like string.
    """
    errors = sorted(_VALIDATOR.iter_errors(job), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = errors[0]
        raise SpecValidationError(_path(err.absolute_path), err.message)
    for section, fields in (
        ("curve", ("x", "y", "z")),
        ("intrinsic", ("kappa", "tau")),
    ):
        if section in job:
            _check_exprs(job[section], fields, f"$.{section}")
            _check_interval(job[section], f"$.{section}")
    if "framed" in job:
        _check_exprs(job["framed"]["curvature"], ("l", "m", "n", "alpha"), "$.framed.curvature")
        _check_interval(job["framed"], "$.framed")
    if "kind" in job:
        try:
            if job["mode"].startswith("framed"):
                FramedPairKind.parse(job["kind"])
            else:
                PairKind.parse(job["kind"])
        except ValueError as err:
            raise SpecValidationError("$.kind", str(err)) from None
    return job


def _check_exprs(obj: dict, fields, where: str) -> None:
    for f in fields:
        try:
            parse(obj[f])
        except ExprSyntaxError as err:
            bad = SpecValidationError(f"{where}.{f}", str(err))
            bad.offset = err.offset
            raise bad from None


def _check_interval(obj: dict, where: str) -> None:
    if not obj["t1"] > obj["t0"]:
        raise SpecValidationError(f"{where}.t1", f"t1 ({obj['t1']!r}) must exceed t0 ({obj['t0']!r})")


# -- results -------------------------------------------------------------------


@dataclass
class JobResult:
    status: int
    report: dict
    table: tuple[list[str], np.ndarray] | None = None

    def json_text(self) -> str:
        return dumps(self.report)

    def csv_text(self) -> str | None:
        if self.table is None:
            return None
        return table_to_csv(*self.table)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(report: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, non-finite as null."""
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def table_to_csv(header: list[str], rows: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in np.asarray(rows, dtype=float):
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def maxloc(values: np.ndarray, param: np.ndarray) -> dict:
    """Largest |value| and the parameter where it occurs."""
    values = np.abs(np.asarray(values, float))
    i = int(np.argmax(values))
    return {"max": float(values[i]), "at": float(param[i])}


def error_report(job: Any, err: BaseException) -> dict:
    detail: dict = {"type": type(err).__name__, "message": str(err)}
    for attr in ("path", "offset", "param", "residual"):
        v = getattr(err, attr, None)
        if v is not None:
            detail[attr] = v
    mode = job.get("mode") if isinstance(job, dict) else None
    return {"version": __version__, "mode": mode, "status": "error", "error": detail}


# -- builders ------------------------------------------------------------------


def build_apparatus(job: dict, tol: Tolerances) -> Apparatus:
    if "curve" in job:
        c = job["curve"]
        spec = CurveSpec(c["x"], c["y"], c["z"], float(c["t0"]), float(c["t1"]), c.get("constants"))
        return frenet_apparatus(spec, Grid.uniform(spec.t0, spec.t1, c["n"]), tol)
    c = job["intrinsic"]
    dtype = np.longdouble if c.get("precision", "double") == "extended" else np.float64
    grid = Grid.uniform(float(c["t0"]), float(c["t1"]), c["n"])
    return integrate_frenet(c["kappa"], c["tau"], FrenetInit.standard(), grid, c.get("constants"), dtype=dtype)


def build_framed(job: dict) -> FramedCurve:
    f = job["framed"]
    t0, t1, n = float(f["t0"]), float(f["t1"]), f["n"]
    if f.get("endpoint", True):
        grid = Grid.uniform(t0, t1, n)
    else:
        grid = Grid.uniform(t0, t0 + (t1 - t0) * (n - 1) / n, n)
    cv = f["curvature"]
    exprs = (cv["l"], cv["m"], cv["n"], cv["alpha"])
    return integrate_framed(exprs, FramedInit.from_flat(f["init"]), grid, f.get("constants"))


def _f64(a) -> np.ndarray:
    return np.asarray(a, dtype=np.float64)


def _frenet_table(app: Apparatus) -> tuple[list[str], np.ndarray]:
    header = ["t", "s", "x", "y", "z", "tx", "ty", "tz", "nx", "ny", "nz", "bx", "by", "bz", "kappa", "tau"]
    cols = [app.param[:, None], app.s[:, None], app.gamma, app.t, app.n, app.b, app.kappa[:, None], app.tau[:, None]]
    return header, np.hstack([_f64(c) for c in cols])


def _framed_table(fc: FramedCurve, curv) -> tuple[list[str], np.ndarray]:
    header = ["t", "x", "y", "z", "nu1x", "nu1y", "nu1z", "nu2x", "nu2y", "nu2z", "mux", "muy", "muz", "l", "m", "n", "alpha"]
    cols = [fc.param[:, None], fc.gamma, fc.nu1, fc.nu2, fc.mu] + [_f64(v)[:, None] for v in (curv.l, curv.m, curv.n, curv.alpha)]
    return header, np.hstack([_f64(c) for c in cols])


def _frenet_report(app: Apparatus) -> dict:
    res = frenet_residuals(app)
    return {
        "samples": len(app),
        "length": float(app.s[-1] - app.s[0]),
        "kappa": {"min": float(np.min(app.kappa)), "max": float(np.max(app.kappa))},
        "tau": {"min": float(np.min(app.tau)), "max": float(np.max(app.tau))},
        "residuals": {"frenet_serret": maxloc(res[INTERIOR:-INTERIOR], _f64(app.param[INTERIOR:-INTERIOR]))},
    }


def _mate_report(rep) -> dict:
    out = {
        "kind": rep.kind.value,
        "verdict": rep.verdict.value,
        "reason": rep.reason,
        "constants": {k: v for k, v in rep.constants.items() if isinstance(v, (int, float, str))},
        "fit_residual": rep.fit_residual,
    }
    if rep.construction is not None:
        c = rep.construction
        out["construction"] = {
            "line_residual": c.line_residual,
            "frame_residual": {"max": c.frame_residual, "at": c.worst_param},
            "curvature_residual": {"max": rep.curvature_residual, "at": rep.curvature_worst_param},
            "sign": c.sign,
        }
    return out


def _framed_report(rep, param: np.ndarray) -> dict:
    out = {"kind": rep.kind.value, "verdict": rep.verdict.value, "reason": rep.reason, "residuals": dict(sorted(rep.residuals.items()))}
    w = rep.witness
    if w is not None:
        out["witness"] = {
            "lambda_constant": w.lam_constant,
            "lambda": {"min": float(np.min(w.lam)), "max": float(np.max(w.lam))},
            "theta_at_t0": float(w.theta[0]),
        }
    return out


# -- modes ---------------------------------------------------------------------


def _mode_frenet(job, tol):
    app = build_apparatus(job, tol)
    return JobResult(EXIT_OK, {"frenet": _frenet_report(app)}, _frenet_table(app))


def _mode_classify(job, tol, construct=False):
    app = build_apparatus(job, tol)
    rep = classify_bertrand_type(app, job["kind"], job.get("params"), tol, construct=construct)
    status = EXIT_INFEASIBLE if rep.verdict is Verdict.INFEASIBLE else EXIT_OK
    table = None
    if rep.construction is not None:
        m = rep.construction.mate_apparatus
        header = ["t", "x", "y", "z", "kappa_bar", "tau_bar", "kappa_bar_fd", "tau_bar_fd", "offset"]
        cols = [app.param[:, None], rep.construction.mate, rep.kappa_bar[:, None], rep.tau_bar[:, None],
                m.kappa[:, None], m.tau[:, None], rep.construction.offset[:, None]]
        table = (header, np.hstack([_f64(c) for c in cols]))
    return JobResult(status, {"mate": _mate_report(rep)}, table)


def _mode_mate(job, tol):
    return _mode_classify(job, tol, construct=True)


def _mode_framed_integrate(job, tol):
    fc = build_framed(job)
    oracle = recompute_curvature(fc)
    sl = slice(INTERIOR, len(fc.param) - INTERIOR)
    dev = np.abs(oracle.as_array()[:, sl] - fc.curvature.as_array()[:, sl]).max(axis=0)
    report = {
        "samples": len(fc.param),
        "drift": fc.drift,
        "delta_defect": fc.delta_defect(),
        "frame_residual": fc.frame_residual(),
        "round_trip": maxloc(dev, fc.param[sl]),
        "singular_points": singular_points(fc, tol, alpha=fc.curvature.alpha),
        "integral_alpha": float(cumulative_integral(fc.curvature.alpha, fc.param)[-1]),
    }
    return JobResult(EXIT_OK, {"framed": report}, _framed_table(fc, fc.curvature))


def _mode_framed_classify(job, tol, construct=False):
    fc = build_framed(job)
    rep = classify_framed(fc, job["kind"], job.get("params"), tol, construct=construct)
    status = EXIT_INFEASIBLE if rep.verdict is Verdict.INFEASIBLE else EXIT_OK
    table = None if rep.mate is None else _framed_table(rep.mate, rep.mate_curvature)
    return JobResult(status, {"framed_mate": _framed_report(rep, fc.param)}, table)


def _mode_framed_mate(job, tol):
    return _mode_framed_classify(job, tol, construct=True)


def _mode_verify(job, tol, seed: int = 0):
    from .verify import run_checks

    v = job.get("verify", {})
    checks = run_checks(tol, seed, v.get("fuzz_curves", 20), v.get("fuzz_framed", 10))
    ok = all(c["passed"] for c in checks)
    return JobResult(EXIT_OK if ok else EXIT_ERROR, {"verify": {"seed": seed, "passed": ok, "checks": checks}})


MODES = {
    "frenet": _mode_frenet,
    "classify": _mode_classify,
    "mate": _mode_mate,
    "framed-integrate": _mode_framed_integrate,
    "framed-classify": _mode_framed_classify,
    "framed-mate": _mode_framed_mate,
    "verify": _mode_verify,
}


def run_job(job: Any, tol: Tolerances = DEFAULT, seed: int = 0) -> JobResult:
    """Validate and execute; library errors become an error report with exit 1."""
    try:
        validate_job(job)
        fn = MODES[job["mode"]]
        result = fn(job, tol, seed) if job["mode"] == "verify" else fn(job, tol)
    except BertrandLabError as err:
        return JobResult(EXIT_ERROR, error_report(job, err))
    head = {"version": __version__, "mode": job["mode"], "status": "infeasible" if result.status == EXIT_INFEASIBLE else ("ok" if result.status == EXIT_OK else "failed")}
    if "name" in job:
        head["name"] = job["name"]
    result.report = {**head, **result.report}
    return result
