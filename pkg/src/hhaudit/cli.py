"""Command-line interface: check, suite, falsify, means, audit.

A suite is a list of self-contained jobs (JSON config or built in). Jobs
may execute concurrently up to the HHAUDIT_WORKERS cap, but the report
always lists results in config order and serializes byte-identically for
a fixed config and tool version: no timestamps, shortest round-trip
decimals, stable key order.

Exit code is 0 iff no job failed at the configuration level; violated
inequalities are data, not process errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, engine, falsifier, means
from .backends import BACKEND_NAME
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    ExhaustionError,
    NonEvaluableError,
    SpecParseError,
)
from .functions import Interval, make_function
from .kernels import Sampler, make_kernel

FORMATS = ("json", "csv", "text")

VERDICT_NON_EVALUABLE = "non_evaluable"
_SUMMARY_KEYS = ("satisfied", "violated", "inconclusive", VERDICT_NON_EVALUABLE)

_CONFIG_ERRORS = (ConfigurationError, SpecParseError, DomainError, KeyError,
                  TypeError, ValueError)
_MATH_ERRORS = (NonEvaluableError, ExhaustionError, ConvergenceError, EvaluationError)


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return repr(obj)
    return obj


def _job_check(job: dict) -> tuple[str, dict]:
    theorem = job["theorem"]
    a, b = float(job["a"]), float(job["b"])
    if theorem in engine.PROPOSITION_IDS:
        rep = means.verify_proposition(theorem, a, b, job.get("n"))
        return rep.verdict, to_jsonable(rep)
    iv = Interval(a, b)
    f = make_function(job["f"], iv)
    g_spec = job.get("g") or job["f"]
    g = make_function(g_spec, iv) if theorem != "HADAMARD" else None
    h = make_kernel(job.get("h") or "id") if theorem != "HADAMARD" else None
    sampler = Sampler(seed=int(job.get("seed", 0)), samples=int(job.get("samples", 256)))
    rep = engine.evaluate(theorem, job.get("variant", "stated"), f, g, h, iv,
                          float(job.get("tol", 1e-9)), sampler=sampler)
    return rep.verdict, to_jsonable(rep)


def _space_from_job(job: dict) -> falsifier.SearchSpace:
    base = falsifier.SearchSpace()
    kwargs = {}
    overrides = job.get("space", {})
    for key in ("a_range", "b_range", "pow_n_range", "exp_c_range",
                "poly_coeff_range", "kernel_s_range", "kernel_scale_range",
                "n_range"):
        if key in overrides:
            kwargs[key] = tuple(overrides[key])
    for key in ("function_families", "kernel_families"):
        if key in overrides:
            kwargs[key] = tuple(overrides[key])
    for key in ("poly_max_degree", "hypothesis_samples"):
        if key in overrides:
            kwargs[key] = int(overrides[key])
    if "respect_hypotheses" in overrides:
        kwargs["respect_hypotheses"] = bool(overrides["respect_hypotheses"])
    if "a" in job and "b" in job:  # point box shorthand
        kwargs["a_range"] = (float(job["a"]), float(job["a"]))
        kwargs["b_range"] = (float(job["b"]), float(job["b"]))
    return dataclasses.replace(base, **kwargs)


def _job_falsify(job: dict) -> tuple[str, dict]:
    space = _space_from_job(job)
    res = falsifier.falsify(job["theorem"], job.get("variant", "stated"), space,
                            int(job.get("budget", 1000)), int(job.get("seed", 0)),
                            tol=float(job.get("tol", 1e-8)))
    verdict = "violated" if res.counterexample is not None else "satisfied"
    return verdict, to_jsonable(res)


def _job_prop(job: dict) -> tuple[str, dict]:
    rep = means.verify_proposition(int(job["prop"]), float(job["a"]),
                                   float(job["b"]), job.get("n"))
    return rep.verdict, to_jsonable(rep)


def _job_chain(job: dict) -> tuple[str, dict]:
    rep = means.verify_chain(float(job["a"]), float(job["b"]),
                             float(job.get("tol", 1e-12)))
    return rep.verdict, to_jsonable(rep)


_JOB_RUNNERS = {
    "check": _job_check,
    "falsify": _job_falsify,
    "prop": _job_prop,
    "chain": _job_chain,
}


def _run_job(job: dict) -> dict:
    entry = {"job": job, "status": "ok", "error": None,
             "verdict": None, "result": None}
    try:
        runner = _JOB_RUNNERS.get(job.get("command"))
        if runner is None:
            raise ConfigurationError(f"unknown command {job.get('command')!r}")
        verdict, result = runner(job)
        entry["verdict"] = verdict
        entry["result"] = result
    except _MATH_ERRORS as exc:
        entry["verdict"] = VERDICT_NON_EVALUABLE
        entry["result"] = {"reason": str(exc)}
    except _CONFIG_ERRORS as exc:
        entry["status"] = "error"
        entry["error"] = f"{type(exc).__name__}: {exc}"
        entry["verdict"] = VERDICT_NON_EVALUABLE
    return entry


def _worker_cap(n_jobs: int) -> int:
    raw = os.environ.get("HHAUDIT_WORKERS", "").strip()
    cap = int(raw) if raw else 4
    return max(1, min(cap, n_jobs)) if n_jobs else 1


def run_suite(config: dict) -> dict:
    """Execute all jobs of a config; report order follows config order."""
    jobs = config.get("jobs", [])
    if not isinstance(jobs, list):
        raise ConfigurationError("config 'jobs' must be a list")
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()).hexdigest()
    cap = _worker_cap(len(jobs))
    if cap > 1:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            entries = list(pool.map(_run_job, jobs))
    else:
        entries = [_run_job(j) for j in jobs]
    summary = {k: 0 for k in _SUMMARY_KEYS}
    errors = 0
    for e in entries:
        summary[e["verdict"]] += 1
        if e["status"] == "error":
            errors += 1
    return {
        "tool": "hhaudit",
        "version": __version__,
        "backend": BACKEND_NAME,
        "config_digest": digest,
        "jobs": entries,
        "summary": {"jobs": len(entries), **summary, "config_errors": errors},
    }


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def _csv_row(entry: dict) -> list[str]:
    job = entry["job"]
    result = entry["result"] or {}
    theorem = job.get("theorem") or (f"PROP{job['prop']}" if "prop" in job else
                                     "CHAIN" if job.get("command") == "chain" else "")
    variant = job.get("variant", "stated") if job.get("command") != "chain" else ""
    lhs = rhs = margin = None
    if entry["verdict"] != VERDICT_NON_EVALUABLE:
        if job.get("command") in ("check", "prop"):
            lhs, rhs, margin = result.get("lhs"), result.get("rhs"), result.get("margin")
        elif job.get("command") == "falsify":
            ce = result.get("counterexample")
            if ce:
                lhs, rhs = ce["lhs"], ce["rhs"]
                margin = ce["rhs"] - ce["lhs"]
            else:
                margin = result.get("stats", {}).get("min_margin")
        elif job.get("command") == "chain":
            margins = [l["margin"] for l in result.get("links", [])]
            margin = min(margins) if margins else None
    return [theorem, variant, _num(lhs), _num(rhs), _num(margin),
            entry["verdict"] or ""]


def emit(report: dict, format: str) -> bytes:
    """Serialize a suite report; total over all report shapes."""
    if format == "json":
        return (json.dumps(report, indent=2) + "\n").encode()
    if format == "csv":
        lines = ["theorem,variant,lhs,rhs,margin,verdict"]
        for entry in report["jobs"]:
            lines.append(",".join(_csv_row(entry)))
        return ("\n".join(lines) + "\n").encode()
    if format == "text":
        header = ["#", "command", "theorem", "variant", "lhs", "rhs",
                  "margin", "verdict"]
        rows = []
        for i, entry in enumerate(report["jobs"]):
            th, var, lhs, rhs, margin, verdict = _csv_row(entry)
            rows.append([str(i), entry["job"].get("command", ""), th, var,
                         lhs, rhs, margin, verdict])
        widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for r in rows:
            lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
        s = report["summary"]
        lines.append("")
        lines.append(
            f"jobs={s['jobs']} satisfied={s['satisfied']} violated={s['violated']} "
            f"inconclusive={s['inconclusive']} non_evaluable={s['non_evaluable']} "
            f"config_errors={s['config_errors']}")
        lines.append(f"tool=hhaudit version={report['version']} "
                     f"backend={report['backend']} digest={report['config_digest'][:16]}")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigurationError(f"unknown format {format!r}")


def audit_config(seed: int = 0) -> dict:
    """Built-in audit: every inequality across corollary kernels and the
    built-in family grid, all six special-means corollaries, and the
    classical means chain."""
    jobs: list[dict] = []
    hadamard_grid = ("pow:1", "pow:2", "pow:3", "exp:1.0",
                     "poly:0.5,1.0,2.0", "symquad", "recip")
    for spec in hadamard_grid:
        for a, b in ((0.25, 1.0), (1.0, 2.0), (0.5, 3.0)):
            jobs.append({"command": "check", "theorem": "HADAMARD", "f": spec,
                         "a": a, "b": b, "tol": 1e-10, "seed": seed})
    pairs = (("pow:1", "pow:1", 1.0, 2.0),
             ("pow:2", "pow:3", 0.5, 2.0),
             ("symquad", "symquad", 0.0, 1.0))
    kernels = ("one", "id", "pow:0.5")
    for theorem in ("TH1", "TH2", "TH3", "TH4", "TH5", "TH6"):
        variants = ("stated", "derived") if theorem in ("TH1", "TH4") else ("stated",)
        for variant in variants:
            for hspec in kernels:
                for fs, gs, a, b in pairs:
                    jobs.append({"command": "check", "theorem": theorem,
                                 "variant": variant, "f": fs, "g": gs,
                                 "h": hspec, "a": a, "b": b, "tol": 1e-10,
                                 "seed": seed, "samples": 128})
    # Godunova-Levin kernel: the moment integrals diverge, which must be
    # reported as non-evaluable rather than skipped.
    jobs.append({"command": "check", "theorem": "TH2", "f": "pow:2", "g": "pow:2",
                 "h": "recip", "a": 1.0, "b": 2.0, "tol": 1e-10, "seed": seed})
    for prop in range(301, 307):
        for a, b, n in ((0.4, 0.5, 1), (1.0, 2.0, 1), (1.0, 2.0, 2)):
            jobs.append({"command": "prop", "prop": prop, "a": a, "b": b, "n": n})
    for a, b in ((1.0, 2.0), (0.25, 9.0), (1.0, 1e6)):
        jobs.append({"command": "chain", "a": a, "b": b, "tol": 1e-12})
    return {"suite": "builtin-audit", "seed": seed, "jobs": jobs}


def _write_out(data: bytes, out: str | None):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _add_common(p):
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhaudit",
        description="Numerical audit of Hermite-Hadamard type product "
                    "inequalities, their corollaries and special means.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate one inequality")
    p.add_argument("--theorem", required=True)
    p.add_argument("--variant", default="stated", choices=("stated", "derived"))
    p.add_argument("--f", default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--h", default="id")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=256)
    _add_common(p)

    p = sub.add_parser("suite", help="run a JSON config of jobs")
    p.add_argument("--config", required=True)
    _add_common(p)

    p = sub.add_parser("falsify", help="search for a counterexample")
    p.add_argument("--theorem", required=True)
    p.add_argument("--variant", default="stated", choices=("stated", "derived"))
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--samples", type=int, default=96,
                   help="hypothesis filter sample count")
    p.add_argument("--a-min", type=float, default=0.1)
    p.add_argument("--a-max", type=float, default=1.0)
    p.add_argument("--b-min", type=float, default=0.5)
    p.add_argument("--b-max", type=float, default=3.0)
    p.add_argument("--respect-hypotheses", action="store_true")
    _add_common(p)

    p = sub.add_parser("means", help="special means: propositions and chain")
    p.add_argument("--prop", type=int, default=None, choices=range(301, 307))
    p.add_argument("--chain", action="store_true")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_common(p)

    p = sub.add_parser("audit", help="run the built-in audit config")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    return parser


def _config_for_args(args) -> dict:
    if args.command == "check":
        if args.theorem.startswith("PROP"):
            job = {"command": "prop", "prop": int(args.theorem[4:]),
                   "a": args.a, "b": args.b}
            if args.n is not None:
                job["n"] = args.n
        else:
            if args.f is None:
                raise ConfigurationError("check needs --f")
            job = {"command": "check", "theorem": args.theorem,
                   "variant": args.variant, "f": args.f, "g": args.g or args.f,
                   "h": args.h, "a": args.a, "b": args.b, "tol": args.tol,
                   "seed": args.seed, "samples": args.samples}
        return {"jobs": [job]}
    if args.command == "suite":
        with open(args.config, "r", encoding="utf-8") as fh:
            return json.load(fh)
    if args.command == "falsify":
        job = {"command": "falsify", "theorem": args.theorem,
               "variant": args.variant, "budget": args.budget,
               "seed": args.seed, "tol": args.tol,
               "space": {"a_range": [args.a_min, args.a_max],
                         "b_range": [args.b_min, args.b_max],
                         "respect_hypotheses": args.respect_hypotheses,
                         "hypothesis_samples": args.samples}}
        return {"jobs": [job]}
    if args.command == "means":
        if args.prop is not None:
            job = {"command": "prop", "prop": args.prop, "a": args.a, "b": args.b}
            if args.n is not None:
                job["n"] = args.n
        elif args.chain:
            job = {"command": "chain", "a": args.a, "b": args.b, "tol": args.tol}
        else:
            raise ConfigurationError("means needs --prop or --chain")
        return {"jobs": [job]}
    if args.command == "audit":
        return audit_config(args.seed)
    raise ConfigurationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_for_args(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(config)
    fmt = args.format
    if args.command == "suite" and "format" in config and fmt == "text":
        fmt = config["format"]
    _write_out(emit(report, fmt), args.out)
    return 0 if report["summary"]["config_errors"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
