from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PRESET_P, mono, poly
from wallcross.algebra import CurveClass, LatticeVector, ScatteringPolynomial, det
from wallcross.geometry import (
    FanRay,
    GeometryError,
    Ray,
    ToricModel,
    Wall,
    WallStructure,
    build_initial_walls,
    cross_kink,
    cross_wall,
    path_crossings,
    perturb_walls,
    primitive_normal,
)
from wallcross.presets import dp4, empty

terms = st.lists(
    st.tuples(
        st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
        st.sampled_from(["0", "H", "E1", "H-E1", "2H-E1"]),
        st.integers(-3, 3).filter(bool),
    ),
    min_size=1,
    max_size=4,
)
directions = st.sampled_from([(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1), (1, -2), (2, 1)])


def wall(d, func, base=(0, 0), vwall=None):
    d = LatticeVector(*d)
    return Wall(Ray(base, d), func, vwall if vwall is not None else d)


# --- normals -------------------------------------------------------------------------


def test_normal_against_travel():
    assert primitive_normal((0, 1), (1, 0)) == (-1, 0)
    assert primitive_normal((1, 1), (-1, 0)) == (1, -1)


def test_tangential_travel_is_an_error():
    with pytest.raises(GeometryError):
        primitive_normal((1, 0), (1, 0))


@given(directions, st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_normal_is_orthogonal_and_opposes_travel(d, travel):
    if det(d, travel) == 0:
        return
    n = primitive_normal(d, travel)
    assert n[0] * d[0] + n[1] * d[1] == 0
    assert n[0] * travel[0] + n[1] * travel[1] < 0


# --- wall crossing ----------------------------------------------------------------------


def test_crossing_the_first_wall_of_theta_one():
    w = wall((-1, 0), poly(((0, 0),), ((1, 0), "H-E4-E5")), vwall=LatticeVector(-1, 0))
    out = cross_wall(mono((-1, -1)), w, (1, 1), 20)
    assert out == poly(((-1, -1),), ((0, -1), "H-E4-E5"))


def test_crossing_the_second_wall_of_theta_one():
    w = wall((0, 1), poly(((0, 0),), ((0, -1), "E1-E5")))
    before = poly(((-1, -1),), ((0, -1), "H-E4-E5"))
    assert cross_wall(before, w, (1, 1), 20) == poly(((-1, -1),), ((-1, -2), "E1-E5"), ((0, -1), "H-E4-E5"))


@settings(max_examples=100, deadline=None)
@given(terms, directions)
def test_trivial_wall_function_acts_as_identity(ts, d):
    p = poly(*ts)
    w = wall(d, ScatteringPolynomial.one())
    travel = (-d[1], d[0])
    assert cross_wall(p, w, travel, 10) == p


@settings(max_examples=100, deadline=None)
@given(terms, st.integers(1, 8))
def test_forward_then_backward_is_identity_up_to_bound(ts, bound):
    from wallcross.algebra import truncate_graded

    p = poly(*ts)
    w = wall((-1, 0), poly(((0, 0),), ((-1, 0), "-E2")), vwall=LatticeVector(1, 0))
    weights = (0, 0, -1, 0, 0, 0)
    there = cross_wall(p, w, (0, 1), bound, weights)
    back = cross_wall(there, w, (0, -1), bound, weights)
    assert truncate_graded(back, weights, bound) == p


@settings(max_examples=100, deadline=None)
@given(terms, directions)
def test_wall_crossing_moves_exponents_along_the_wall(ts, d):
    p = poly(*ts)
    m = (-d[0], -d[1])
    w = wall(d, poly(((0, 0),), (m, "E3")), vwall=LatticeVector(*d))
    out = cross_wall(p, w, (-d[1], d[0]), 6)
    sources = p.zexps()
    for z in out.zexps():
        assert any(det((z[0] - s[0], z[1] - s[1]), d) == 0 for s in sources)


# --- kinks ----------------------------------------------------------------------------


def test_kink_on_theta_three_path():
    fr = FanRay(LatticeVector(-1, 0), CurveClass.parse("H-E1"))
    p = poly(((1, 1),), ((0, 1), "-E2"))
    assert cross_kink(p, fr, (0, -1)) == poly(((1, 1), "H-E1"), ((0, 1), "H-E1-E2"))


def test_kink_on_theta_four_path():
    fr = FanRay(LatticeVector(-1, -1), CurveClass.parse("E1"))
    assert cross_kink(mono((0, -1)), fr, (0, 1)) == mono((0, -1), "E1")


@settings(max_examples=100, deadline=None)
@given(terms, directions)
def test_zero_kink_acts_as_identity(ts, d):
    p = poly(*ts)
    assert cross_kink(p, FanRay(LatticeVector(*d), CurveClass.zero()), (-d[1], d[0])) == p


@settings(max_examples=100, deadline=None)
@given(terms, directions, st.sampled_from(["H", "E1", "H-E1", "-E3"]), st.sampled_from(["H", "E2", "2H-E1"]))
def test_kinks_add(ts, d, k1, k2):
    p = poly(*ts)
    c1, c2 = CurveClass.parse(k1), CurveClass.parse(k2)
    d = LatticeVector(*d)
    travel = (-d[1], d[0])
    twice = cross_kink(cross_kink(p, FanRay(d, c1), travel), FanRay(d, c2), travel)
    assert twice == cross_kink(p, FanRay(d, c1 + c2), travel)
    for (z, _, _), _ in twice.items():
        assert z in p.zexps()


# --- building and perturbing -----------------------------------------------------------


def test_initial_wall_from_a_blowup_on_the_negative_x_axis():
    ws = build_initial_walls(dp4())
    w = ws.walls[0]
    assert w.func == poly(((0, 0),), ((-1, 0), "-E2"))
    assert w.vwall == (1, 0)
    assert w.support.dir == (-1, 0)


def test_two_coincident_walls_on_the_diagonal():
    ws = build_initial_walls(dp4())
    diag = [w for w in ws.walls if w.support.dir == (1, 1)]
    assert [w.func for w in diag] == [poly(((0, 0),), ((1, 1), "-E3")), poly(((0, 0),), ((1, 1), "-E4"))]
    assert all(w.support.base == (0, 0) for w in diag)


def test_no_blowups_means_no_walls():
    assert build_initial_walls(empty()).walls == ()


def test_default_perturbation_separates_the_diagonal_walls():
    ws = perturb_walls(build_initial_walls(dp4()))
    diag = [w for w in ws.walls if w.vwall == (-1, -1)]
    assert len(diag) == 2
    (a, b) = (w.support.base for w in diag)
    assert det((a[0] - b[0], a[1] - b[1]), (1, 1)) != 0


def test_perturbation_keeps_the_function_far_out_on_the_ray():
    # moving the E2 wall below the x axis makes it cross the (-1,-1) fan ray, whose kink E1
    # is absorbed into the function stored at the new base point
    ws = perturb_walls(build_initial_walls(dp4()))
    assert ws.walls[0].func == poly(((0, 0),), ((-1, 0), "E1-E2"))


def test_zero_offsets_leave_a_generic_structure_unchanged():
    tm = dp4()
    ws = WallStructure(
        tm.fan,
        (
            wall((-1, 0), poly(((0, 0),), ((-1, 0), "-E2")), base=(0, F(1, 2)), vwall=LatticeVector(1, 0)),
            wall((0, -1), poly(((0, 0),), ((0, -1), "-E5")), base=(F(-1, 2), 2), vwall=LatticeVector(0, 1)),
        ),
    )
    assert perturb_walls(ws, {0: (0, 0), 1: (0, 0)}) == ws


def test_offsets_making_three_walls_concurrent_are_rejected():
    # E2, E5 and E3 lines all pass through (-1/2, 1/2)
    offsets = {0: (F(1, 3), F(1, 2)), 1: (F(1, 2), F(3, 2)), 2: (F(1, 13), F(40, 13)), 3: (F(-1, 2), F(2))}
    with pytest.raises(GeometryError, match="single point"):
        perturb_walls(build_initial_walls(dp4()), offsets)


def test_unknown_offset_index_is_rejected():
    with pytest.raises(GeometryError):
        perturb_walls(build_initial_walls(dp4()), {7: (1, 1)})


def test_model_validation():
    fan = dp4().fan
    with pytest.raises(GeometryError):
        ToricModel(fan, ((LatticeVector(1, 0), CurveClass.parse("E2")),))
    with pytest.raises(GeometryError):
        ToricModel(fan + (fan[0],), ())


# --- paths ---------------------------------------------------------------------------


def test_theta_one_path_crosses_two_walls(completed):
    events = path_crossings(completed, (-1, -1), PRESET_P)
    assert [e.kind for e in events] == ["wall", "wall"]
    assert [e.wall.func for e in events] == [
        poly(((0, 0),), ((1, 0), "H-E4-E5")),
        poly(((0, 0),), ((0, -1), "E1-E5")),
    ]


def test_theta_three_path_crosses_the_h_minus_e1_kink(completed):
    events = path_crossings(completed, (1, 1), PRESET_P)
    kinks = [e.fan_ray.kink for e in events if e.kind == "kink"]
    assert CurveClass.parse("H-E1") in kinks


def test_events_are_ordered_from_infinity_inward(completed):
    for d in ((-1, -1), (-1, 0), (1, 1), (0, -1)):
        params = [e.param for e in path_crossings(completed, d, PRESET_P)]
        assert params == sorted(params, reverse=True)


def test_path_with_nothing_in_the_way_has_no_events():
    ws = build_initial_walls(empty())
    assert path_crossings(ws, (1, 1), (F(3), F(16, 5))) == []


def test_endpoint_on_a_fan_ray_is_degenerate(completed):
    with pytest.raises(GeometryError):
        path_crossings(completed, (1, 1), (0, 0))
    with pytest.raises(GeometryError):
        path_crossings(completed, (1, 1), (F(-3), F(-3)))
