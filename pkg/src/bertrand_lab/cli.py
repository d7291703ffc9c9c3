"""Command-line entry point: ``bertrand-lab --spec job.json [--out DIR]``.

Exit status: 0 success, 2 when the verdict is Infeasible, 1 on any error.
With several spec files the worst status wins (1 over 2 over 0).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .jobs import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, JobResult, dumps, error_report, run_job
from .tolerances import DEFAULT

ENV_TOL = "BERTRAND_LAB_TOL"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bertrand-lab",
        description="Classify, construct and verify Bertrand-type mates of space curves and framed curves.",
    )
    p.add_argument("--spec", required=True, nargs="+", metavar="PATH", help="job file(s) in JSON")
    p.add_argument("--out", metavar="DIR", help="output directory (default: report JSON on stdout)")
    p.add_argument("--format", choices=("json", "csv", "both"), default=None,
                   help="artifacts to write; overrides the job's output.format (default json)")
    p.add_argument("--tol", type=float, default=None, help="global tolerance scale factor")
    p.add_argument("--jobs", type=int, default=1, help="process several spec files concurrently")
    p.add_argument("--seed", type=int, default=0, help="random seed for verify mode fuzzing")
    return p


def tolerance_scale(flag: float | None, environ=os.environ) -> float:
    """--tol wins, then $BERTRAND_LAB_TOL, then 1."""
    if flag is not None:
        value, source = flag, "--tol"
    elif environ.get(ENV_TOL):
        source = ENV_TOL
        try:
            value = float(environ[ENV_TOL])
        except ValueError:
            raise ValueError(f"{ENV_TOL} must be a number, got {environ[ENV_TOL]!r}") from None
    else:
        return 1.0
    if not value > 0 or value != value or value == float("inf"):
        raise ValueError(f"{source} must be a positive finite number, got {value!r}")
    return value


def _load(path: Path) -> tuple[object, JobResult | None]:
    try:
        return json.loads(path.read_text("utf-8")), None
    except (OSError, UnicodeDecodeError) as err:
        return None, JobResult(EXIT_ERROR, error_report(None, err))
    except json.JSONDecodeError as err:
        err.path = "$"  # type: ignore[attr-defined]
        err.offset = err.pos  # type: ignore[attr-defined]
        return None, JobResult(EXIT_ERROR, error_report(None, err))


def run_file(path: str, scale: float, seed: int) -> JobResult:
    job, failed = _load(Path(path))
    if failed is not None:
        return failed
    return run_job(job, DEFAULT.scaled(scale), seed)


def _format(job_format: str | None, flag: str | None) -> str:
    return flag or job_format or "json"


def _job_format(path: str) -> str | None:
    try:
        job = json.loads(Path(path).read_text("utf-8"))
        return job.get("output", {}).get("format")
    except Exception:
        return None


def emit(result: JobResult, path: str, out: str | None, fmt: str, stdout) -> None:
    text = result.json_text()
    if out is None:
        stdout.write(text)
        return
    target = Path(out)
    target.mkdir(parents=True, exist_ok=True)
    stem = Path(path).stem
    if fmt in ("json", "both") or result.table is None:
        (target / f"{stem}.json").write_text(text, "utf-8")
    if fmt in ("csv", "both") and result.table is not None:
        (target / f"{stem}.csv").write_text(result.csv_text(), "utf-8")


def combine(statuses: list[int]) -> int:
    if EXIT_ERROR in statuses:
        return EXIT_ERROR
    if EXIT_INFEASIBLE in statuses:
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        scale = tolerance_scale(args.tol)
    except ValueError as err:
        print(f"bertrand-lab: {err}", file=stderr)
        return EXIT_ERROR
    if args.jobs < 1:
        print("bertrand-lab: --jobs must be at least 1", file=stderr)
        return EXIT_ERROR
    if len(args.spec) > 1 and args.out is None:
        print("bertrand-lab: several spec files need --out", file=stderr)
        return EXIT_ERROR

    if args.jobs > 1 and len(args.spec) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_file, args.spec, [scale] * len(args.spec), [args.seed] * len(args.spec)))
    else:
        results = [run_file(p, scale, args.seed) for p in args.spec]

    for path, res in zip(args.spec, results):
        emit(res, path, args.out, _format(_job_format(path), args.format), stdout)
        if res.status == EXIT_ERROR:
            err = res.report.get("error")
            msg = err["message"] if err else "verification checks failed"
            print(f"bertrand-lab: {path}: {msg}", file=stderr)
    return combine([r.status for r in results])


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
