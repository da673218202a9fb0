"""Command-line front end: build models, run the identity battery, classify,
and evaluate the exponential map, with deterministic JSON or text reports.

Exit codes: 0 success, 1 check or classification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import expmap, models, report
from .errors import CurvHomError, ExcludedSignature, UsageError, ZeroParameter
from .linalg import TOL


def _parse_p(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"--p must be a real number, got {text!r}") from exc


def _parse_sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise UsageError(f"sign must be + or -, got {text!r}")


def _parse_components(text: str, n: int, flag: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{flag} needs {n} comma-separated components, got {len(parts)}")
    try:
        return np.array([float(x) for x in parts])
    except ValueError as exc:
        raise UsageError(f"{flag} components must be real numbers") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvhom4",
        description=(
            "Left-invariant Einstein 4-metrics: model construction, identity "
            "verification, classification, and the exponential map."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("build", "emit the model descriptor"),
        ("verify", "run the full identity battery"),
        ("classify", "run the algebraic classifier"),
        ("expmap", "evaluate the exponential map"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--variant", choices=("diag", "nondiag", "const"), default="diag")
        p.add_argument("--p", default="1", help="family parameter (nonzero real)")
        p.add_argument("--sign", default="+", help="sign of the inner product on the axis (+ or -)")
        p.add_argument("--delta", default="1", help="metric sign of the cyclic direction (+1 or -1)")
        p.add_argument("--orientation", default="1", help="orientation (+1 or -1)")
        p.add_argument("--tol", type=float, default=TOL)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "text"), default="json")
        if name == "expmap":
            p.add_argument("--v", default="1,0,0,0", help="algebra components a,v1,v2,v3")
            p.add_argument("--y", default="0,0,0,1", help="base point x1,x2,x3,t (t > 0)")
            p.add_argument("--trajectory", type=int, default=0, metavar="N",
                           help="dump N+1 trajectory samples")
    return parser


def _params_from_args(args) -> models.ModelFamilyParams:
    p = _parse_p(args.p)
    if args.variant in ("diag", "const") and float(p) == 0.0:
        raise UsageError("--p must be nonzero for this variant")
    return models.ModelFamilyParams(
        args.variant, p, _parse_sign(args.sign), _parse_sign(args.delta)
    )


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True)
    lines = [f"command: {doc['command']}"]
    model = doc.get("model")
    if model:
        lines.append(
            "model: variant={variant} p={p} sign={pm_sign:+d} delta={delta:+d} "
            "signature={signature}".format(**model)
        )
    if "classification" in doc:
        cls = doc["classification"]
        lines.append(f"classification: {cls['case']}")
        for k, v in cls["evidence"]:
            lines.append(f"  {k}: {v}")
    if "checks" in doc:
        for row in doc["checks"]:
            status = "pass" if row["passed"] else "FAIL"
            note = f"  ({row['note']})" if row.get("note") else ""
            lines.append(f"{status}  {row['name']}  max_abs_error={row['max_abs_error']:.3e}{note}")
        lines.append(f"all_passed: {doc['all_passed']}")
    if "expmap" in doc:
        em = doc["expmap"]
        lines.append(f"endpoint: {em['endpoint']}")
        lines.append(f"differential_deviation: {em['differential_deviation']:.3e}")
    return "\n".join(lines) + "\n"


def _cmd_expmap(args, bundle) -> dict:
    v = _parse_components(args.v, 4, "--v")
    y = _parse_components(args.y, 4, "--y")
    if y[-1] <= 0:
        raise UsageError("--y must have a positive last (t) coordinate")
    model = bundle.model
    res = expmap.flow(model, v, y, 1.0)
    diff = expmap.differential_check(model, y, v, np.array([0.0, 1.0, 0.0, 0.0]))
    doc = {
        "command": "expmap",
        "model": report.model_descriptor(bundle),
        "expmap": {
            "v": [report._fmt(x) for x in v],
            "y": [report._fmt(x) for x in y],
            "endpoint": [report._fmt(x) for x in res.endpoint],
            "steps": res.steps,
            "error_estimate": report._fmt(res.error_estimate),
            "differential_deviation": report._fmt(diff["deviation"]),
        },
    }
    if args.trajectory > 0:
        samples = []
        for i in range(args.trajectory + 1):
            tau = i / args.trajectory
            pt = expmap.flow_closed_form(model, v, y, tau)
            samples.append([report._fmt(tau)] + [report._fmt(x) for x in pt])
        doc["expmap"]["trajectory"] = samples
    return doc


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    t0 = time.perf_counter()
    try:
        params = _params_from_args(args)
        orientation = _parse_sign(args.orientation)
        bundle = report.analyze(params, orientation=orientation, tol=args.tol)
        if args.command == "build":
            doc = report.build_report(bundle)
            failed = False
        elif args.command == "verify":
            doc = report.verify_report(bundle, seed=args.seed, tol=args.tol)
            failed = not doc["all_passed"]
        elif args.command == "classify":
            doc = report.classify_report(bundle, tol=args.tol)
            failed = False
        else:
            doc = _cmd_expmap(args, bundle)
            failed = False
    except (UsageError, ZeroParameter, ExcludedSignature, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CurvHomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out = _render(doc, args.format)
    sys.stdout.write(out)
    elapsed = time.perf_counter() - t0
    print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
