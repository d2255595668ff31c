"""Command line entry: scenario runner plus direct per-task subcommands.

`orbitlab run` executes scenario files (optionally in parallel and against a
stored expected report); the other subcommands assemble a scenario from
flags and files for one-off runs.  Exit code 0 means every check in every
report passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

from .errors import WorkbenchError
from .reports import Report, emit_report
from .scenarios import Scenario, ScenarioError, run_scenario

OUT_ENV = "ORBITLAB_OUT"


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _emit(report: Report, fmt: str, out_dir: Optional[str], label: str) -> bytes:
    blob = emit_report(report, fmt)
    if out_dir:
        ext = {"json": "json", "csv": "csv", "text": "txt"}[fmt]
        target = Path(out_dir) / f"{label}.{ext}"
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(blob)
    else:
        sys.stdout.write(blob.decode("utf-8"))
    return blob


def _run_one(path: str, fmt: str, out_dir: Optional[str],
             check_path: Optional[str]) -> Tuple[str, bool]:
    expected = Path(check_path).read_bytes() if check_path else None
    scenario = Scenario.from_dict(_load_json(path))
    report = run_scenario(scenario)
    _emit(report, fmt, out_dir, Path(path).stem)
    ok = report.passed
    if expected is not None and expected != emit_report(report, "json"):
        ok = False
        sys.stderr.write(f"{path}: report differs from {check_path}\n")
    return path, ok


def _cmd_run(args) -> int:
    out_dir = args.out or os.environ.get(OUT_ENV)
    jobs = max(1, args.jobs)
    results: List[Tuple[str, bool]] = []
    if jobs == 1 or len(args.scenario) == 1:
        for path in args.scenario:
            results.append(_run_one(path, args.format, out_dir, args.check))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_run_one, path, args.format, out_dir, args.check)
                for path in args.scenario
            ]
            results = [f.result() for f in futures]
    failed = [path for path, ok in results if not ok]
    for path in failed:
        sys.stderr.write(f"FAIL {path}\n")
    return 1 if failed else 0


def _scenario_from_flags(args, task: str, payload: dict) -> Scenario:
    return Scenario(
        name=args.name,
        scalar_mode=args.scalar_mode,
        window=args.window,
        seed=args.seed,
        task=task,
        payload=payload,
    )


def _finish(args, scenario: Scenario) -> int:
    report = run_scenario(scenario)
    out_dir = args.out or os.environ.get(OUT_ENV)
    _emit(report, args.format, out_dir, scenario.name)
    if out_dir and args.format == "json":
        # companion CSV for the tabular sections
        _emit(report, "csv", out_dir, scenario.name)
    return 0 if report.passed else 1


def _cmd_transport(args) -> int:
    payload = {
        "a": _load_json(args.a),
        "b": _load_json(args.b),
        "p": _load_json(args.p),
        "disk": _load_json(args.disk),
        "stages": args.stages,
        "eps_schedule": args.eps_schedule,
    }
    return _finish(args, _scenario_from_flags(args, "transport", payload))


def _cmd_triangularize(args) -> int:
    payload = {"basis": _load_json(args.basis), "stages": args.stages}
    return _finish(args, _scenario_from_flags(args, "triangularize", payload))


def _cmd_disks(args) -> int:
    if args.from_null_seq:
        payload = {"generators": _load_json(args.from_null_seq)}
        if args.probes:
            payload["probes"] = _load_json(args.probes)
    elif args.common:
        a_path, b_path = args.common
        if not args.targets:
            raise ScenarioError("--common needs --targets FILE")
        payload = {
            "common": {
                "a": _load_json(a_path),
                "b": _load_json(b_path),
                "targets": _load_json(args.targets),
                "eps": args.eps,
            }
        }
    else:
        raise ScenarioError("disks needs --from-null-seq or --common")
    return _finish(args, _scenario_from_flags(args, "disk", payload))


def _cmd_hypercyclic(args) -> int:
    if args.mode == "build-shift":
        payload = {
            "mode": "build-shift",
            "basis": _load_json(args.basis),
            "p": _load_json(args.p),
            "disk": _load_json(args.disk),
        }
    elif args.mode == "witness":
        payload = {
            "mode": "witness",
            "operator": _load_json(args.op),
            "x": _load_json(args.x),
            "y": _load_json(args.y),
            "p": _load_json(args.p),
            "eps": args.eps,
            "max_n": args.max_n,
        }
    elif args.mode == "refute":
        return _cmd_refute(args)
    else:
        payload = {"mode": "demo", "x0": _load_json(args.x), "horizon": args.horizon}
    return _finish(args, _scenario_from_flags(args, "hypercyclic", payload))


def _cmd_refute(args) -> int:
    payload = {
        "family_levels": args.levels,
        "first_active": args.first_active,
        "b": _load_json(args.b) if args.b else [],
        "operator": _load_json(args.op),
        "x": _load_json(args.x),
        "horizon": args.horizon,
    }
    return _finish(args, _scenario_from_flags(args, "refute", payload))


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--name", default="adhoc")
    parser.add_argument("--scalar-mode", default="exact", choices=["exact", "float"])
    parser.add_argument("--window", type=int, default=12)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", default="json", choices=["json", "csv", "text"])
    parser.add_argument("--out", default=None,
                        help=f"output directory (default: ${OUT_ENV} or stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitlab",
        description="finite-stage operator transport and shift workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run scenario files")
    run_p.add_argument("--scenario", action="append", required=True)
    run_p.add_argument("--format", default="json", choices=["json", "csv", "text"])
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.add_argument("--check", default=None,
                       help="compare the JSON report against a stored file")
    run_p.add_argument("--out", default=None)
    run_p.set_defaults(func=_cmd_run)

    tr = sub.add_parser("transport", help="back-and-forth matching of two enumerations")
    tr.add_argument("--a", required=True)
    tr.add_argument("--b", required=True)
    tr.add_argument("--p", required=True)
    tr.add_argument("--disk", required=True)
    tr.add_argument("--stages", type=int, required=True)
    tr.add_argument("--eps-schedule", default="geometric:1/2")
    _add_common(tr)
    tr.set_defaults(func=_cmd_transport)

    tg = sub.add_parser("triangularize", help="interleaved minor-preserving prefixes")
    tg.add_argument("--basis", required=True)
    tg.add_argument("--stages", type=int, required=True)
    _add_common(tg)
    tg.set_defaults(func=_cmd_triangularize)

    dk = sub.add_parser("disks", help="disk gauges from null sequences or common nets")
    dk.add_argument("--from-null-seq", default=None)
    dk.add_argument("--probes", default=None)
    dk.add_argument("--common", nargs=2, metavar=("A", "B"), default=None)
    dk.add_argument("--targets", default=None)
    dk.add_argument("--eps", default="1/4")
    _add_common(dk)
    dk.set_defaults(func=_cmd_disks)

    hc = sub.add_parser("hypercyclic", help="shift assembly, witnesses, demos")
    hc.add_argument("mode", choices=["build-shift", "witness", "demo", "refute"])
    hc.add_argument("--basis", default=None)
    hc.add_argument("--p", default=None)
    hc.add_argument("--disk", default=None)
    hc.add_argument("--op", default=None)
    hc.add_argument("--x", default=None)
    hc.add_argument("--y", default=None)
    hc.add_argument("--b", default=None)
    hc.add_argument("--eps", default="1/1000")
    hc.add_argument("--max-n", type=int, default=64)
    hc.add_argument("--horizon", type=int, default=8)
    hc.add_argument("--levels", type=int, default=4)
    hc.add_argument("--first-active", type=int, default=1)
    _add_common(hc)
    hc.set_defaults(func=_cmd_hypercyclic)

    rf = sub.add_parser("refute", help="orbit-versus-set instrumentation")
    rf.add_argument("--op", required=True)
    rf.add_argument("--x", required=True)
    rf.add_argument("--b", default=None)
    rf.add_argument("--levels", type=int, required=True)
    rf.add_argument("--first-active", type=int, default=1)
    rf.add_argument("--horizon", type=int, default=8)
    _add_common(rf)
    rf.set_defaults(func=_cmd_refute)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WorkbenchError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
