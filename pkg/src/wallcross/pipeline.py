"""End-to-end run: model -> consistent structure -> thetas -> relations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import CLASSICAL, QUANTUM, ScatteringPolynomial, poly_mul
from .geometry import GeometryError, Point, ToricModel, WallStructure, build_initial_walls, perturb_walls
from .presets import PRESETS
from .quantum import QuantumTheta, compute_quantum_theta_basis, find_quantum_relations, quantize, relation_pairs
from .scattering import ConsistencyReport, complete_to_consistency, consistency_audit
from .serialize import (
    load_model,
    model_to_json,
    point_to_json,
    relation_to_json,
    structure_to_json,
    theta_to_json,
    word_polynomial_to_json,
)
from .theta import (
    Relation,
    RelationError,
    ThetaFunction,
    WordPolynomial,
    compute_theta_basis,
    eliminate_theta4,
    find_relation,
    theta_exprs,
)

MODES = ("classical", "quantum", "both")

# tried in order when neither the config nor the model fixes an endpoint
_FALLBACK_ENDPOINTS = tuple(
    (Fraction(a, 7) + Fraction(1, 101), Fraction(b, 5) + Fraction(1, 103))
    for a, b in [(-13, -7), (-5, -11), (9, -4), (4, 9), (-20, 3)]
)


@dataclass(frozen=True)
class PipelineConfig:
    preset: str | None = "dp4"
    model_path: str | None = None
    endpoint: Point | None = None
    bound: int = 20
    mode: str = "both"
    out_dir: Path | None = None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("bound must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        if (self.preset is None) == (self.model_path is None):
            raise ValueError("give exactly one of a preset name and a model file")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; known: {', '.join(sorted(PRESETS))}")

    def load(self) -> ToricModel:
        if self.model_path is not None:
            return load_model(self.model_path)
        return PRESETS[self.preset]()


@dataclass
class PipelineResult:
    model: ToricModel
    perturbed: WallStructure
    completed: WallStructure
    audit: list[ConsistencyReport]
    endpoint: Point
    thetas: list[ThetaFunction] = field(default_factory=list)
    products: dict[tuple[int, int], ScatteringPolynomial] = field(default_factory=dict)
    classical: list[Relation] = field(default_factory=list)
    quantum: list[Relation] = field(default_factory=list)
    qthetas: list[QuantumTheta] = field(default_factory=list)
    cubic: dict[str, WordPolynomial] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    # whether reading the classical thetas on the quantum torus gives the transported ones
    shortcut_agrees: bool | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def build_structure(model: ToricModel, bound: int) -> tuple[WallStructure, WallStructure]:
    """The perturbed initial structure and its completion."""
    perturbed = perturb_walls(build_initial_walls(model), model.offsets)
    return perturbed, complete_to_consistency(perturbed, bound)


def _pick_endpoint(ws: WallStructure, bound: int) -> tuple[Point, list[ThetaFunction]]:
    for P in _FALLBACK_ENDPOINTS:
        try:
            return P, compute_theta_basis(ws, P, bound)
        except GeometryError:
            continue
    raise GeometryError("no generic endpoint found; pass one explicitly")


def run_pipeline(config: PipelineConfig, model: ToricModel | None = None) -> PipelineResult:
    model = model or config.load()
    perturbed, completed = build_structure(model, config.bound)
    audit = consistency_audit(completed, config.bound)
    endpoint = config.endpoint if config.endpoint is not None else model.endpoint
    if endpoint is None:
        endpoint, thetas = _pick_endpoint(completed, config.bound)
    else:
        thetas = compute_theta_basis(completed, endpoint, config.bound)
    res = PipelineResult(model, perturbed, completed, audit, endpoint, thetas)
    res.checks["audit"] = all(r.consistent for r in audit)

    exprs = theta_exprs(thetas)
    for i, j in itertools.combinations(sorted(exprs), 2):
        res.products[(i, j)] = poly_mul(exprs[i], exprs[j])
    opposite, _ = relation_pairs(len(thetas))
    if config.mode in ("classical", "both"):
        res.classical = [find_relation(thetas, i, j, CLASSICAL) for i, j in opposite]
        res.checks["classical_relations"] = all(not r.residual(exprs) for r in res.classical)
    if config.mode in ("quantum", "both"):
        shortcut = [quantize(th, completed.exact) for th in thetas]
        res.qthetas = compute_quantum_theta_basis(completed, endpoint, config.bound, thetas)
        res.shortcut_agrees = theta_exprs(shortcut) == theta_exprs(res.qthetas)
        res.quantum = find_quantum_relations(res.qthetas)
        qexprs = theta_exprs(res.qthetas)
        res.checks["quantum_relations"] = all(not r.residual(qexprs) for r in res.quantum)
    _eliminate(res)
    return res


def _eliminate(res: PipelineResult) -> None:
    """Cubic identities when one product relation can be solved for theta_4."""
    if len(res.thetas) != 4:
        return
    sources = [("classical", res.classical, theta_exprs(res.thetas), CLASSICAL)]
    sources.append(("quantum", [r for r in res.quantum if r.kind == "product"], theta_exprs(res.qthetas), QUANTUM))
    for name, rels, exprs, mode in sources:
        if len(rels) < 2:
            continue
        try:
            cubic = eliminate_theta4(rels)
        except RelationError:
            continue
        res.cubic[name] = cubic
        res.checks[f"{name}_cubic"] = not cubic.evaluate(exprs, mode)
    if "classical" in res.cubic and "quantum" in res.cubic:
        res.checks["cubic_q_to_1"] = (
            res.cubic["quantum"].specialize_commutative() == res.cubic["classical"].specialize_commutative()
        )


# --- reports --------------------------------------------------------------------


def report_json(res: PipelineResult, bound: int) -> dict[str, Any]:
    names = res.model.classes
    out: dict[str, Any] = {
        "model": model_to_json(res.model),
        "bound": bound,
        "endpoint": point_to_json(res.endpoint),
        "structure": structure_to_json(res.completed, res.audit),
        "thetas": [theta_to_json(th, names) for th in res.thetas],
        "quantum_thetas": [
            {"index": th.index, "expr": th.expr.to_json(names)} for th in res.qthetas
        ],
        "quantization_shortcut_agrees": res.shortcut_agrees,
        "products": [
            {"lhs": list(k), "expr": p.to_json(names)} for k, p in sorted(res.products.items())
        ],
        "relations": {
            "classical": [relation_to_json(r, names) for r in res.classical],
            "quantum": [relation_to_json(r, names) for r in res.quantum],
        },
        "elimination": {
            k: word_polynomial_to_json(v, names, k == "quantum") for k, v in sorted(res.cubic.items())
        },
        "checks": dict(sorted(res.checks.items())),
        "ok": res.ok,
    }
    return out


def report_text(res: PipelineResult) -> str:
    names = res.model.classes
    lines = [f"model: {res.model.name or 'custom'}"]
    lines.append(f"endpoint P = ({res.endpoint[0]}, {res.endpoint[1]})")
    lines.append(f"walls after completion: {len(res.completed.walls)}")
    bad = [r for r in res.audit if not r.consistent]
    lines.append(f"consistency audit: {len(res.audit) - len(bad)}/{len(res.audit)} intersection points consistent")
    lines.append("")
    lines.append("theta functions:")
    for th in res.thetas:
        lines.append(f"  th{th.index} = {th.local_expr.format(names, quantum=False)}")
    if res.classical:
        lines.append("")
        lines.append("classical relations:")
        lines += [f"  {r.format(names)}" for r in res.classical]
    if res.qthetas:
        lines.append("")
        agree = "agrees with" if res.shortcut_agrees else "differs from"
        lines.append(f"quantum theta functions (wall-crossing transport; {agree} plain reinterpretation):")
        for th in res.qthetas:
            lines.append(f"  Th{th.index} = {th.expr.format(names, quantum=True)}")
    if res.quantum:
        lines.append("")
        lines.append("quantum relations:")
        lines += [f"  {r.format(names)}" for r in res.quantum]
    for name, cubic in sorted(res.cubic.items()):
        lines.append("")
        lines.append(f"{name} cubic after eliminating th4:")
        lines.append(f"  {cubic.format(names, name == 'quantum')}")
    lines.append("")
    lines.append("checks: " + ", ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in sorted(res.checks.items())))
    return "\n".join(lines) + "\n"


def parse_point(text: str) -> Point:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y' with rational coordinates, got {text!r}")
    return (Fraction(parts[0]), Fraction(parts[1]))

