"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .algebra import AlgebraError
from .geometry import GeometryError
from .pipeline import PipelineConfig, build_structure, parse_point, report_json, report_text, run_pipeline
from .quantum import QuantizationError, compute_quantum_theta_basis, find_quantum_relations, quantize
from .render import render_svg
from .scattering import ScatteringError, consistency_audit
from .serialize import dumps, point_to_json, relation_to_json, structure_to_json
from .theta import RelationError, compute_theta_basis

ERRORS = (GeometryError, ScatteringError, RelationError, AlgebraError, QuantizationError, ValueError, OSError)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--preset", help="built-in model name (default: dp4)")
    src.add_argument("--model", help="toric model JSON file")
    common.add_argument("--endpoint", type=parse_point, help="theta endpoint as 'x,y' (rationals allowed)")
    common.add_argument("--bound", type=int, default=20, help="degree bound for completion and series (default 20)")
    common.add_argument("--mode", choices=("classical", "quantum", "both"), default="both")
    common.add_argument("--out-dir", type=Path, help="write files here instead of printing")
    common.add_argument("--format", choices=("json", "text", "svg"), default=None, help="stdout format")

    p = argparse.ArgumentParser(prog="wallcross", description="Wall structures, theta functions and mirror relations.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="run the full pipeline")
    r = sub.add_parser("render", parents=[common], help="draw the wall structure as SVG")
    r.add_argument("--stage", choices=("initial", "completed"), default="completed")
    sub.add_parser("check", parents=[common], help="consistency audit of the completed structure")
    sub.add_parser("quantize", parents=[common], help="quantum theta functions and their relations")
    return p


def _config(args) -> PipelineConfig:
    preset = None if args.model else (args.preset or "dp4")
    return PipelineConfig(preset, args.model, args.endpoint, args.bound, args.mode, args.out_dir)


def _emit(files: dict[str, str], fmt: str, out_dir: Path | None) -> None:
    """Print the file for ``fmt``, or write every file into ``out_dir``."""
    if out_dir is None:
        sys.stdout.write(files[fmt])
        return
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / _FILENAMES[name]).write_text(text, encoding="utf-8")


_FILENAMES = {"json": "report.json", "text": "equations.txt", "svg": "structure.svg"}


def cmd_compute(args) -> int:
    cfg = _config(args)
    res = run_pipeline(cfg)
    files = {
        "json": dumps(report_json(res, cfg.bound)),
        "text": report_text(res),
        "svg": render_svg(res.completed, res.thetas, res.endpoint, title=res.model.name),
    }
    _emit(files, args.format or "json", cfg.out_dir)
    return 0 if res.ok else 2


def cmd_render(args) -> int:
    cfg = _config(args)
    model = cfg.load()
    perturbed, completed = build_structure(model, cfg.bound)
    ws = perturbed if args.stage == "initial" else completed
    endpoint = cfg.endpoint if cfg.endpoint is not None else model.endpoint
    thetas = []
    if endpoint is not None and args.stage == "completed":
        thetas = compute_theta_basis(completed, endpoint, cfg.bound)
    svg = render_svg(ws, thetas, endpoint, title=f"{model.name} {args.stage}".strip())
    _emit({"svg": svg}, "svg", cfg.out_dir)
    return 0


def cmd_check(args) -> int:
    cfg = _config(args)
    model = cfg.load()
    _, completed = build_structure(model, cfg.bound)
    audit = consistency_audit(completed, cfg.bound)
    ok = all(r.consistent for r in audit)
    data = structure_to_json(completed, audit)
    data["ok"] = ok
    lines = [f"{len(completed.walls)} walls, {len(audit)} intersection points"]
    for rep in audit:
        lines.append(f"  ({rep.point[0]}, {rep.point[1]}): {'consistent' if rep.consistent else 'INCONSISTENT'}")
    files = {"json": dumps(data), "text": "\n".join(lines) + "\n"}
    if cfg.out_dir is not None:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        (cfg.out_dir / "audit.json").write_text(files["json"], encoding="utf-8")
    else:
        sys.stdout.write(files["text" if args.format == "text" else "json"])
    return 0 if ok else 2


def cmd_quantize(args) -> int:
    cfg = _config(args)
    model = cfg.load()
    _, completed = build_structure(model, cfg.bound)
    endpoint = cfg.endpoint if cfg.endpoint is not None else model.endpoint
    if endpoint is None:
        raise GeometryError("quantize needs an endpoint (--endpoint or one stored in the model)")
    thetas = compute_theta_basis(completed, endpoint, cfg.bound)
    shortcut = [quantize(th, completed.exact) for th in thetas]
    qthetas = compute_quantum_theta_basis(completed, endpoint, cfg.bound, thetas)
    agrees = all(a.expr == b.expr for a, b in zip(shortcut, qthetas))
    rels = find_quantum_relations(qthetas)
    names = model.classes
    data = {
        "endpoint": point_to_json(endpoint),
        "shortcut_agrees": agrees,
        "qthetas": [
            {"index": q.index, "expr": q.expr.to_json(names), "rendered": q.expr.format(names, quantum=True)}
            for q in qthetas
        ],
        "relations": [relation_to_json(r, names) for r in rels],
    }
    lines = [f"Th{q.index} = {q.expr.format(names, quantum=True)}" for q in qthetas]
    lines += [r.format(names) for r in rels]
    files = {"json": dumps(data), "text": "\n".join(lines) + "\n"}
    if cfg.out_dir is not None:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        (cfg.out_dir / "quantum.json").write_text(files["json"], encoding="utf-8")
    else:
        sys.stdout.write(files["text" if args.format == "text" else "json"])
    return 0


COMMANDS = {"compute": cmd_compute, "render": cmd_render, "check": cmd_check, "quantize": cmd_quantize}


def _error_object(exc: Exception) -> dict:
    err: dict = {"type": type(exc).__name__, "message": str(exc)}
    point = getattr(exc, "point", None)
    if point is not None:
        err["point"] = point_to_json((Fraction(point[0]), Fraction(point[1])))
    remainder = getattr(exc, "remainder", None)
    if remainder is not None:
        err["remainder"] = remainder.to_json()
    return {"error": err}


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ERRORS as exc:
        sys.stdout.write(json.dumps(_error_object(exc), indent=2) + "\n")
        return 1
