from __future__ import annotations

from fractions import Fraction as F

import pytest

from conftest import poly
from oracles import loop_is_identity, tc, to_sympy, X, Y
from wallcross.algebra import LatticeVector, ScatteringPolynomial, det
from wallcross.geometry import Ray, Wall, WallStructure, local_function
from wallcross.presets import dp4
from wallcross.scattering import (
    ScatteringError,
    check_consistency_at_point,
    complete_to_consistency,
    consistency_audit,
    intersection_points,
)

Q_POINT = (F(-1, 2), F(1, 2))


def two_walls() -> WallStructure:
    """Incoming E2 and E5 walls whose lines meet at (-1/2, 1/2), away from every fan ray."""
    e2 = Wall(Ray((0, F(1, 2)), (-1, 0)), poly(((0, 0),), ((-1, 0), "-E2")), LatticeVector(1, 0), label="E2")
    e5 = Wall(Ray((F(-1, 2), 2), (0, -1)), poly(((0, 0),), ((0, -1), "-E5")), LatticeVector(0, 1), label="E5")
    return WallStructure(dp4().fan, (e2, e5))


def oracle_half_rays(ws: WallStructure, pt):
    """``(direction, f)`` for every wall half-ray leaving ``pt``, with ``f`` as a sympy expression."""
    out = []
    for w in ws.walls:
        b, d = w.support.base, w.support.dir
        r = (pt[0] - b[0], pt[1] - b[1])
        if det(r, d) != 0:
            continue
        s = F(r[0] * d[0] + r[1] * d[1], d[0] ** 2 + d[1] ** 2)
        if s < 0:
            continue
        f = to_sympy(local_function(w, s, ws.fan))
        out.append((tuple(d), f))
        if s > 0:
            out.append(((-d[0], -d[1]), f))
    return out


def test_two_crossing_walls_are_inconsistent():
    ws = two_walls()
    a, b = tc("-E2"), tc("-E5")
    rays = [((1, 0), 1 + a / X), ((-1, 0), 1 + a / X), ((0, 1), 1 + b / Y), ((0, -1), 1 + b / Y)]
    assert not loop_is_identity(rays)
    # the structure as stored: E2 and E5 only reach the point on their incoming halves
    full = complete_to_consistency(two_walls(), 20)
    lines_only = full.with_walls(full.walls[:4])
    assert not check_consistency_at_point(lines_only, Q_POINT, 20).consistent
    assert not loop_is_identity(oracle_half_rays(lines_only, Q_POINT))


def test_completion_inserts_the_product_wall():
    ws = complete_to_consistency(two_walls(), 20)
    new = [w for w in ws.walls if w.parents and len(w.parents) == 2]
    assert len(new) == 1
    w = new[0]
    assert w.support.base == Q_POINT
    assert w.support.dir == (1, 1)
    assert w.func == poly(((0, 0),), ((-1, -1), "-E2-E5"))
    assert check_consistency_at_point(ws, Q_POINT, 20).consistent
    assert loop_is_identity(oracle_half_rays(ws, Q_POINT))


def test_loop_oracle_confirms_the_pentagon_identity():
    a, b = tc("-E2"), tc("-E5")
    rays = [
        ((1, 0), 1 + a / X),
        ((-1, 0), 1 + a / X),
        ((0, 1), 1 + b / Y),
        ((0, -1), 1 + b / Y),
        ((1, 1), 1 + a * b / (X * Y)),
    ]
    assert loop_is_identity(rays)


def test_incoming_walls_are_extended_to_lines():
    ws = complete_to_consistency(two_walls(), 20)
    dirs = {(w.label, tuple(w.support.dir)) for w in ws.walls}
    assert {("E2", (-1, 0)), ("E2'", (1, 0)), ("E5", (0, -1)), ("E5'", (0, 1))} <= dirs


def test_empty_structure_is_returned_unchanged():
    ws = WallStructure(dp4().fan, ())
    assert complete_to_consistency(ws, 20).walls == ()


def test_structure_without_intersections_is_unchanged():
    w = Wall(Ray((F(1, 3), 1), (1, 1)), poly(((0, 0),), ((-1, -1), "E3")), LatticeVector(1, 1))
    ws = WallStructure(dp4().fan, (w,))
    assert complete_to_consistency(ws, 20).walls == (w,)


def test_parallel_walls_give_no_intersection_event():
    e3 = Wall(Ray((F(1, 3), 1), (1, 1)), poly(((0, 0),), ((-1, -1), "E3")), LatticeVector(1, 1))
    e4 = Wall(Ray((F(1, 5), 2), (1, 1)), poly(((0, 0),), ((-1, -1), "E4")), LatticeVector(1, 1))
    ws = complete_to_consistency(WallStructure(dp4().fan, (e3, e4)), 20)
    assert ws.meta["events"] == []
    assert intersection_points(ws) == []
    assert consistency_audit(ws) == []


def test_non_unimodular_crossing_is_an_error():
    a = Wall(Ray((F(1, 3), F(1, 2)), (-1, 0)), poly(((0, 0),), ((-1, 0), "-E2")), LatticeVector(1, 0))
    b = Wall(Ray((F(-1, 2), 3), (-1, -2)), poly(((0, 0),), ((-1, -2), "-E5")), LatticeVector(1, 2))
    with pytest.raises(ScatteringError, match="non-unimodular"):
        complete_to_consistency(WallStructure(dp4().fan, (a, b)), 20)


def test_non_single_factor_function_is_rejected():
    f = poly(((0, 0),), ((-1, 0), "-E2"), ((-2, 0), "-2E2"))
    w = Wall(Ray((F(1, 3), F(1, 2)), (-1, 0)), f, LatticeVector(1, 0))
    with pytest.raises(ScatteringError):
        complete_to_consistency(WallStructure(dp4().fan, (w,)), 20)


def test_low_bound_reports_the_frontier(structures):
    perturbed, _ = structures
    with pytest.raises(ScatteringError) as info:
        complete_to_consistency(perturbed, 1)
    assert info.value.frontier
    truncated = complete_to_consistency(perturbed, 1, allow_truncated=True)
    assert not truncated.exact


def test_preset_completion_is_finite(completed):
    assert completed.exact
    assert len(completed.walls) == 16
    assert completed.meta["frontier"] == []


def test_completion_is_idempotent(completed):
    again = complete_to_consistency(completed, 20)
    assert again.walls == completed.walls


def test_completion_does_not_depend_on_bound_once_finite(structures):
    perturbed, completed = structures
    assert complete_to_consistency(perturbed, 2).walls == completed.walls


def test_every_intersection_passes_the_loop_check(completed):
    audit = consistency_audit(completed, 20)
    assert len(audit) == 8
    assert all(r.consistent for r in audit)
    assert all(not r.residuals["x"] and not r.residuals["y"] for r in audit)


def test_loop_oracle_agrees_with_the_audit(completed):
    for pt in intersection_points(completed):
        assert loop_is_identity(oracle_half_rays(completed, pt))


def test_removing_an_inserted_wall_breaks_consistency(completed):
    k = next(i for i, w in enumerate(completed.walls) if w.label == "E2|E5'")
    pt = completed.walls[k].support.base
    broken = completed.with_walls(w for i, w in enumerate(completed.walls) if i != k)
    assert not check_consistency_at_point(broken, pt, 20).consistent
    assert not loop_is_identity(oracle_half_rays(broken, pt))


def test_inconsistent_loop_leaves_a_nonzero_residual():
    full = complete_to_consistency(two_walls(), 20)
    rep = check_consistency_at_point(full.with_walls(full.walls[:4]), Q_POINT, 6)
    assert rep.residuals["x"] or rep.residuals["y"]
    assert isinstance(rep.images["x"], ScatteringPolynomial)
