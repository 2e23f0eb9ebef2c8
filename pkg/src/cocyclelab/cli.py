"""Command-line interface: ``cocyclelab validate|run|explain|schema|corpus``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import (CocycleLabError, HypothesisFailed, NoCertificate, NormPreconditionFailed, NotDirect,
                     PreconditionFailed, RelatorViolation, SchemaError)
from .problem import PROBLEM_SCHEMA, TASK_TYPES, load_document, parse_problem
from .tasks import EXPLAIN, RUNNERS

REPORT_FORMAT = "cocyclelab-report/1"
ELIDE_SCALARS = 10**4
# a hypothesis or check of the statement does not hold: outcome "fail", exit 1
FAIL_KINDS = (HypothesisFailed, PreconditionFailed, NormPreconditionFailed, NotDirect, NoCertificate,
              RelatorViolation)

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "cocyclelab machine report",
    "type": "object",
    "required": ["format", "version", "tasks", "summary", "exit_code"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "version": {"type": "string"},
        "exit_code": {"enum": [0, 1, 2]},
        "summary": {"type": "object", "properties": {k: {"type": "integer"} for k in
                                                    ("pass", "fail", "error", "skipped")}},
        "tasks": {"type": "array", "items": {
            "type": "object",
            "required": ["index", "id", "type", "outcome"],
            "properties": {
                "index": {"type": "integer"}, "id": {"type": "string"}, "type": {"type": "string"},
                "outcome": {"enum": ["pass", "fail", "error", "skipped"]},
                "result": {"type": "object"},
                "error": {"type": "object", "required": ["kind", "message"]},
            },
        }},
        "errors": {"type": "array"},
    },
}


def jsonable(obj, elide: int = ELIDE_SCALARS):
    """Plain JSON tree: rationals as ``"p/q"``, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v, elide) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v, elide) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.size > elide:
            return {"elided": True, "shape": list(obj.shape)}
        return jsonable(obj.tolist(), elide)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isfinite(f):
            return f
        return "nan" if math.isnan(f) else ("inf" if f > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "describe"):
        return jsonable(obj.describe(), elide)
    return str(obj)


def _error(e: BaseException) -> dict:
    out = {"kind": e.kind if isinstance(e, CocycleLabError) else type(e).__name__, "message": str(e)}
    for attr in ("check", "relator", "residual", "witness"):
        v = getattr(e, attr, None)
        if v is not None:
            out[attr] = v
    return out


def run_task(prob, i: int, opts: dict) -> dict:
    task = prob.tasks[i]
    rec = {"index": i, "id": prob.task_label(i), "type": task["type"]}
    try:
        passed, payload = RUNNERS[task["type"]](prob, task, opts)
        rec["outcome"] = "pass" if passed else "fail"
        rec["result"] = payload
    except FAIL_KINDS as e:
        rec["outcome"] = "fail"
        rec["error"] = _error(e)
    except SchemaError as e:
        rec["outcome"] = "error"
        rec["error"] = {"kind": "SchemaError", "message": str(e), "paths": [p for p, _ in e.errors]}
    except (CocycleLabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        rec["outcome"] = "error"
        rec["error"] = _error(e)
    return jsonable(rec)


_WORKER_STATE: dict = {}


def _init_worker(doc, opts):
    # parse once per process; declarations are then built lazily and cached
    _WORKER_STATE["prob"] = parse_problem(doc, build=False)
    _WORKER_STATE["opts"] = opts


def _worker(i):
    return run_task(_WORKER_STATE["prob"], i, _WORKER_STATE["opts"])


def execute(doc: dict, fail_fast: bool = False, force: bool = False, tol: float | None = None,
            jobs: int = 1, witnesses: bool | None = None) -> dict:
    """Run every task of a problem document and assemble the machine report."""
    try:
        prob = parse_problem(doc)
    except SchemaError as e:
        return _report([], [{"path": p, "message": m} for p, m in e.errors])
    opts = dict(prob.options)
    if tol is not None:
        opts["tol"] = tol
    if witnesses is not None:
        opts["witnesses"] = witnesses
    opts["force"] = force
    n = len(prob.tasks)
    if jobs > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(doc, opts)) as ex:
            results = list(ex.map(_worker, range(n), chunksize=max(1, n // (4 * jobs))))
    else:
        results = []
        for i in range(n):
            results.append(run_task(prob, i, opts))
            if fail_fast and results[-1]["outcome"] != "pass":
                break
    # identical merge for both modes: everything after the first non-pass is skipped
    if fail_fast:
        for k, r in enumerate(results):
            if r["outcome"] != "pass":
                results = results[: k + 1]
                break
        for i in range(len(results), n):
            results.append({"index": i, "id": prob.task_label(i), "type": prob.tasks[i]["type"],
                            "outcome": "skipped"})
    return _report(results, [])


def _report(results: list, errors: list) -> dict:
    summary = {k: sum(r["outcome"] == k for r in results) for k in ("pass", "fail", "error", "skipped")}
    if errors or summary["error"]:
        code = 2
    elif summary["fail"]:
        code = 1
    else:
        code = 0
    out = {"format": REPORT_FORMAT, "version": __version__, "tasks": results, "summary": summary,
           "exit_code": code}
    if errors:
        out["errors"] = errors
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _scalars(d: dict, prefix="") -> list[str]:
    parts = []
    for k in sorted(d):
        v = d[k]
        if isinstance(v, bool) or isinstance(v, int) or (isinstance(v, float) and k != "tol"):
            parts.append(f"{prefix}{k}={v:.3g}" if isinstance(v, float) else f"{prefix}{k}={v}")
        elif isinstance(v, dict) and k in ("hypotheses", "checks", "pairing", "equivalence", "chi_law"):
            parts += _scalars(v, f"{k}.")
    return parts


def render(report: dict) -> str:
    lines = []
    for e in report.get("errors", []):
        lines.append(f"schema error at {e['path']}: {e['message']}")
    for r in report["tasks"]:
        head = f"{r['outcome'].upper():7s} {r['id']:16s} {r['type']:24s}"
        if "error" in r:
            lines.append(f"{head} {r['error']['kind']}: {r['error']['message']}")
        elif "result" in r:
            lines.append(f"{head} {' '.join(_scalars(r['result']))}".rstrip())
        else:
            lines.append(head.rstrip())
    s = report["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['error']} errors, {s['skipped']} skipped "
                 f"(exit {report['exit_code']})")
    return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def cmd_validate(args) -> int:
    try:
        prob = parse_problem(load_document(_read(args.file)))
    except SchemaError as e:
        for p, m in e.errors:
            print(f"{p}: {m}", file=sys.stderr)
        return 2
    print(f"ok: {len(prob.tasks)} tasks")
    return 0


def cmd_run(args) -> int:
    try:
        doc = load_document(_read(args.file))
    except SchemaError as e:
        report = _report([], [{"path": p, "message": m} for p, m in e.errors])
    else:
        report = execute(doc, args.fail_fast, args.force, args.tol, args.jobs,
                         False if args.no_witnesses else None)
    text = dumps(report)
    if args.json == "-":
        sys.stdout.write(text)
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
        sys.stdout.write(render(report))
    return report["exit_code"]


def cmd_explain(args) -> int:
    if args.task not in EXPLAIN:
        print(f"unknown task type {args.task!r}; known: {', '.join(TASK_TYPES)}", file=sys.stderr)
        return 2
    statement, hyps = EXPLAIN[args.task]
    print(f"{args.task}: {statement}")
    for h in hyps:
        print(f"  hypothesis: {h}")
    return 0


def cmd_schema(args) -> int:
    schema = PROBLEM_SCHEMA if args.which == "problem" else REPORT_SCHEMA
    print(json.dumps(schema, indent=2, sort_keys=True))
    return 0


def cmd_corpus(args) -> int:
    from .corpus import full_corpus
    text = json.dumps(full_corpus(args.seed), indent=1, sort_keys=True) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cocyclelab",
                                 description="Group cohomology with finite-dimensional coefficients.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", help="check a problem document")
    p.add_argument("file", help="problem document (JSON), or - for stdin")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("run", help="run the tasks of a problem document")
    p.add_argument("file")
    p.add_argument("--fail-fast", action="store_true", help="skip tasks after the first non-pass")
    p.add_argument("--force", action="store_true", help="run theorems whose norm hypotheses fail")
    p.add_argument("--tol", type=float, default=None, help="float tolerance (default from the document)")
    p.add_argument("--json", metavar="OUT", default=None, help="write the machine report here (- for stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--no-witnesses", action="store_true", help="omit bases and primitives")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("explain", help="print the statement checked by a task type")
    p.add_argument("task", help="task type, e.g. product-iso")
    p.set_defaults(func=cmd_explain)
    p = sub.add_parser("schema", help="print the problem or report JSON schema")
    p.add_argument("which", choices=["problem", "report"])
    p.set_defaults(func=cmd_schema)
    p = sub.add_parser("corpus", help="write the seeded benchmark corpus as a problem document")
    p.add_argument("out", help="output path, or - for stdout")
    p.add_argument("--seed", type=int, default=20240601)
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
