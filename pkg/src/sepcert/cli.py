"""Command line interface.

Subcommands: check (primal queries), separate (dual queries), rates,
plot, and corpus (run the built-in example scenes, write a delimited
summary, per-scene JSON reports and SVG figures, and compare against
the golden verdicts).

Exit codes: 0 all queries resolved (whatever the verdicts), 2 parse or
validation error, 3 internal soundness error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import SoundnessError
from .scalars import ScalarParseError, as_scalar
from .scenes import Query, Scene, SceneError, load_scene, parse_scene
from .reports import audit_report, emit_report, run_scene

CHECK_KINDS = ("extremal", "locally-extremal", "stationary", "approx-stationary",
               "chain", "distance", "crosscheck", "product-boundary")
SEPARATE_KINDS = ("ep-condition", "separation-infimum", "zn", "nonlocal-ep")
RATE_KINDS = ("rates",)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", help="path to a .scene.json document")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--eps-schedule",
                        help="comma-separated rationals, e.g. 1/2,1/4,1/8")
    common.add_argument("--face-cap", type=int, default=10_000)
    common.add_argument("--grid", type=int, default=2)
    common.add_argument("--seed", type=int, default=0,
                        help="recorded in reports; all searches are deterministic")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (breaks byte-identity)")
    common.add_argument("--out", help="output file (reports) or directory (corpus)")
    parser = argparse.ArgumentParser(
        prog="sepcert",
        description="Exact extremality/stationarity verdicts and "
                    "generalized separation certificates for pairs of "
                    "polyhedral-union sets.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common],
                   help="primal verdicts (extremality chain, distances)")
    sub.add_parser("separate", parents=[common], help="dual separation certificates")
    sub.add_parser("rates", parents=[common], help="regularity rate estimates")
    plot = sub.add_parser("plot", parents=[common], help="render a scene to SVG")
    plot.add_argument("--window", default="-3,3,-2,2",
                      help="world window x0,x1,y0,y1")
    sub.add_parser("corpus", parents=[common],
                   help="run the built-in example corpus")
    return parser


def _with_schedule(scene: Scene, schedule) -> Scene:
    if schedule is None:
        return scene
    queries = []
    for q in scene.queries:
        args = dict(q.args)
        if q.kind in ("extremal", "stationary", "approx-stationary", "chain"):
            args.setdefault("schedule", [str(s) for s in schedule])
        queries.append(Query(q.kind, args))
    return Scene(scene.name, scene.dim, scene.norm, scene.regions,
                 scene.points, tuple(queries))


def _parse_schedule(text: str | None):
    if text is None:
        return None
    return tuple(as_scalar(part.strip()) for part in text.split(","))


def _emit(report: dict, args) -> None:
    data = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _run_filtered(args, kinds) -> int:
    if not args.scene:
        raise SceneError("cli", "--scene is required for this command")
    scene = _with_schedule(load_scene(args.scene), _parse_schedule(args.eps_schedule))
    report = run_scene(scene, kinds=kinds, face_cap=args.face_cap,
                       grid=args.grid, timings=args.timings)
    audit_report(report)
    _emit(report, args)
    return 0


def _cmd_plot(args) -> int:
    from .plotting import render_scene
    if not args.scene:
        raise SceneError("cli", "--scene is required for plot")
    scene = load_scene(args.scene)
    window = tuple(as_scalar(w.strip()) for w in args.window.split(","))
    if len(window) != 4:
        raise SceneError("cli", "--window needs x0,x1,y0,y1")
    report = run_scene(scene, face_cap=args.face_cap, grid=args.grid)
    out = args.out or f"{scene.name}.svg"
    render_scene(scene, out, window, report)
    print(f"wrote {out}")
    return 0


def corpus_scene_names() -> list[str]:
    names = []
    for entry in resources.files("sepcert.corpus").iterdir():
        if entry.name.endswith(".scene.json"):
            names.append(entry.name[:-len(".scene.json")])
    return sorted(names)


def load_corpus_scene(name: str) -> Scene:
    text = resources.files("sepcert.corpus").joinpath(f"{name}.scene.json").read_text()
    return parse_scene(text, name)


def load_corpus_golden(name: str) -> dict:
    import json
    text = resources.files("sepcert.corpus").joinpath(f"{name}.golden.json").read_text()
    return json.loads(text)


def compare_with_golden(report: dict, golden: dict) -> list[str]:
    """Mismatch descriptions between a report and its golden record."""
    problems = []
    expected = golden.get("expected", [])
    results = report["results"]
    if len(expected) != len(results):
        problems.append(f"{report['scene']}: query count {len(results)} != "
                        f"golden {len(expected)}")
        return problems
    for rec, want in zip(results, expected):
        where = f"{report['scene']}/{rec['kind']}"
        if rec["kind"] != want["kind"]:
            problems.append(f"{where}: kind mismatch with golden {want['kind']}")
            continue
        if rec["status"] != want["status"]:
            problems.append(f"{where}: status {rec['status']} != {want['status']}")
        if "value" in want and rec.get("value") != want["value"]:
            problems.append(f"{where}: value {rec.get('value')} != {want['value']}")
        if "chain" in want:
            got = (rec.get("certificate") or {}).get("vector")
            if got != want["chain"]:
                problems.append(f"{where}: chain {got} != {want['chain']}")
    return problems


def _cmd_corpus(args) -> int:
    from .plotting import render_scene
    out_dir = Path(args.out) if args.out else Path("corpus_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = ["scene\tkind\tstatus\tvalue\tresolution\tdetail"]
    mismatches: list[str] = []
    for name in corpus_scene_names():
        scene = load_corpus_scene(name)
        report = run_scene(scene, face_cap=args.face_cap, grid=args.grid,
                           timings=args.timings)
        audit_report(report)
        (out_dir / f"{name}.report.json").write_bytes(emit_report(report, "json"))
        try:
            render_scene(scene, out_dir / f"{name}.svg", report=report)
        except Exception as exc:  # non-planar scenes only
            print(f"figure skipped for {name}: {exc}", file=sys.stderr)
        for rec in report["results"]:
            rows.append("\t".join([
                name, rec["kind"], rec["status"], str(rec.get("value") or ""),
                str(rec.get("resolution") or ""), rec.get("detail", "")]))
        mismatches.extend(compare_with_golden(report, load_corpus_golden(name)))
    summary = "\n".join(rows) + "\n"
    (out_dir / "summary.tsv").write_text(summary)
    sys.stdout.write(summary)
    if mismatches:
        for m in mismatches:
            print(f"GOLDEN MISMATCH: {m}", file=sys.stderr)
        return 1
    print(f"corpus OK: golden verdicts matched; reports and figures in {out_dir}/")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return _run_filtered(args, CHECK_KINDS)
        if args.command == "separate":
            return _run_filtered(args, SEPARATE_KINDS)
        if args.command == "rates":
            return _run_filtered(args, RATE_KINDS)
        if args.command == "plot":
            return _cmd_plot(args)
        if args.command == "corpus":
            return _cmd_corpus(args)
        parser.error(f"unknown command {args.command}")
    except (SceneError, ScalarParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SoundnessError as exc:
        print(f"soundness error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
