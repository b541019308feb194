"""JSON encoding of models, wall structures, theta functions and relations."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .algebra import DP4_CLASSES, CurveClass, ScatteringPolynomial
from .geometry import FanRay, GeometryError, Point, Ray, ToricModel, Wall, WallStructure, lv
from .scattering import ConsistencyReport
from .theta import Relation, ThetaFunction, WordPolynomial


def rational_to_json(x: Fraction) -> dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def rational_from_json(data) -> Fraction:
    if isinstance(data, Mapping):
        return Fraction(int(data["num"]), int(data["den"]))
    if isinstance(data, (int, str)):
        return Fraction(data)
    raise GeometryError(f"cannot read a rational number from {data!r}")


def point_to_json(p: Sequence) -> list[dict[str, int]]:
    return [rational_to_json(p[0]), rational_to_json(p[1])]


def point_from_json(data) -> Point:
    if len(data) != 2:
        raise GeometryError(f"a point needs two coordinates, got {data!r}")
    return (rational_from_json(data[0]), rational_from_json(data[1]))


def _class_from_json(data, names: Sequence[str]) -> CurveClass:
    if isinstance(data, str):
        return CurveClass.parse(data, names)
    return CurveClass.from_dict(data, names)


# --- toric models -----------------------------------------------------------------


def model_to_json(tm: ToricModel) -> dict[str, Any]:
    names = tm.classes
    out: dict[str, Any] = {
        "classes": list(names),
        "fan": [{"dir": list(fr.dir), "kink": fr.kink.to_dict(names)} for fr in tm.fan],
        "blowups": [{"dir": list(d), "class": e.format(names)} for d, e in tm.blowups],
    }
    if tm.name:
        out["name"] = tm.name
    if tm.offsets:
        out["offsets"] = [{"wall": i, "base": point_to_json(p)} for i, p in sorted(tm.offsets.items())]
    if tm.endpoint is not None:
        out["endpoint"] = point_to_json(tm.endpoint)
    return out


def model_from_json(data: Mapping) -> ToricModel:
    try:
        names = tuple(data.get("classes", DP4_CLASSES))
        fan = tuple(FanRay(lv(f["dir"]), _class_from_json(f.get("kink", {}), names)) for f in data["fan"])
        blowups = tuple((lv(b["dir"]), _class_from_json(b["class"], names)) for b in data.get("blowups", []))
        offsets = None
        if "offsets" in data:
            offsets = {int(o["wall"]): point_from_json(o["base"]) for o in data["offsets"]}
        endpoint = point_from_json(data["endpoint"]) if "endpoint" in data else None
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"malformed toric model: missing or invalid field {exc}") from exc
    return ToricModel(fan, blowups, names, offsets, endpoint, name=str(data.get("name", "")))


def load_model(path: str | Path) -> ToricModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


# --- wall structures --------------------------------------------------------------


def wall_to_json(w: Wall, names: Sequence[str]) -> dict[str, Any]:
    return {
        "label": w.label,
        "base": point_to_json(w.support.base),
        "dir": list(w.support.dir),
        "vwall": list(w.vwall),
        "func": w.func.to_json(names),
        "parents": list(w.parents),
    }


def wall_from_json(data: Mapping, names: Sequence[str]) -> Wall:
    return Wall(
        Ray(point_from_json(data["base"]), lv(data["dir"])),
        ScatteringPolynomial.from_json(data["func"], names),
        lv(data["vwall"]),
        label=data.get("label", ""),
        parents=tuple(data.get("parents", ())),
    )


def report_to_json(rep: ConsistencyReport, names: Sequence[str]) -> dict[str, Any]:
    return {
        "point": point_to_json(rep.point),
        "consistent": rep.consistent,
        "crossings": list(rep.crossings),
        "residuals": {k: v.to_json(names) for k, v in sorted(rep.residuals.items())},
    }


def structure_to_json(ws: WallStructure, audit: Sequence[ConsistencyReport] | None = None) -> dict[str, Any]:
    names = ws.classes
    out: dict[str, Any] = {
        "classes": list(names),
        "fan": [{"dir": list(fr.dir), "kink": fr.kink.to_dict(names)} for fr in ws.fan],
        "walls": [wall_to_json(w, names) for w in ws.walls],
        "exact": ws.exact,
    }
    if "bound" in ws.meta:
        out["bound"] = ws.meta["bound"]
    if audit is not None:
        out["audit"] = [report_to_json(r, names) for r in audit]
    elif "audit" in ws.meta:
        out["audit"] = ws.meta["audit"]
    return out


def structure_from_json(data: Mapping) -> WallStructure:
    names = tuple(data["classes"])
    fan = tuple(FanRay(lv(f["dir"]), _class_from_json(f.get("kink", {}), names)) for f in data["fan"])
    walls = tuple(wall_from_json(w, names) for w in data["walls"])
    meta: dict[str, Any] = {}
    if "bound" in data:
        meta["bound"] = data["bound"]
    if "audit" in data:
        meta["audit"] = data["audit"]
    return WallStructure(fan, walls, names, bool(data.get("exact", True)), meta)


# --- theta functions and relations ------------------------------------------------


def theta_to_json(th: ThetaFunction, names: Sequence[str]) -> dict[str, Any]:
    return {
        "index": th.index,
        "direction": list(th.direction),
        "expr": th.local_expr.to_json(names),
        "rendered": th.local_expr.format(names, quantum=False),
        "crossings": [
            {"kind": e.kind, "index": e.index, "point": point_to_json(e.point)} for e in th.crossings
        ],
    }


def relation_to_json(rel: Relation, names: Sequence[str]) -> dict[str, Any]:
    return {
        "kind": rel.kind,
        "mode": rel.mode,
        "lhs": list(rel.lhs),
        "constant": rel.constant.to_json(names),
        "coeffs": {str(k): c.to_json(names) for k, c in sorted(rel.coeffs.items())},
        "rendered": rel.format(names),
    }


def relation_from_json(data: Mapping, names: Sequence[str]) -> Relation:
    return Relation(
        tuple(data["lhs"]),
        ScatteringPolynomial.from_json(data["constant"], names),
        {int(k): ScatteringPolynomial.from_json(v, names) for k, v in data["coeffs"].items()},
        data.get("mode", "classical"),
        data.get("kind", "product"),
    )


def word_polynomial_to_json(wp: WordPolynomial, names: Sequence[str], quantum: bool) -> dict[str, Any]:
    return {"terms": wp.to_json(names), "rendered": wp.format(names, quantum)}


def dumps(obj: Any) -> str:
    """Deterministic UTF-8 JSON text."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
