"""Rays, fan rays with kinks, walls, and the two elementary transports."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Mapping, Sequence

from .algebra import (
    DP4_CLASSES,
    AlgebraError,
    CurveClass,
    LatticeVector,
    ScatteringPolynomial,
    det,
    poly_mul,
    poly_pow_graded,
    poly_pow_truncated,
)

Point = tuple[Fraction, Fraction]
ORIGIN: Point = (Fraction(0), Fraction(0))

DEFAULT_DELTA = Fraction(1, 7)


class GeometryError(ValueError):
    """Raised for degenerate geometry: tangential crossings, triple points, etc."""

    def __init__(self, message: str, point: Point | None = None):
        super().__init__(message if point is None else f"{message} at {fmt_point(point)}")
        self.point = point


def as_point(p: Sequence) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


def fmt_point(p: Sequence) -> str:
    return f"({p[0]}, {p[1]})"


def lv(v: Sequence[int]) -> LatticeVector:
    return LatticeVector(int(v[0]), int(v[1]))


@dataclass(frozen=True)
class Ray:
    """The set ``{base + s * dir : s >= 0}``; ``dir`` is primitive."""

    base: Point
    dir: LatticeVector

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base))
        object.__setattr__(self, "dir", lv(self.dir))
        if not self.dir.is_primitive():
            raise GeometryError(f"ray direction {tuple(self.dir)} is not primitive")

    def at(self, s: Fraction) -> Point:
        return (self.base[0] + s * self.dir[0], self.base[1] + s * self.dir[1])


@dataclass(frozen=True)
class FanRay:
    dir: LatticeVector
    kink: CurveClass

    def __post_init__(self):
        object.__setattr__(self, "dir", lv(self.dir))
        if not self.dir.is_primitive():
            raise GeometryError(f"fan ray direction {tuple(self.dir)} is not primitive")


@dataclass(frozen=True)
class Wall:
    """A ray carrying ``func = 1 + sum_k c_k t^beta_k z^(-k * vwall)``.

    ``func`` is the wall-crossing function valid at ``support.base``; along
    the support it is parallel-transported through fan kinks.  Incoming walls
    have ``support.dir == -vwall``; scattering products and line extensions
    have ``support.dir == vwall``.
    """

    support: Ray
    func: ScatteringPolynomial
    vwall: LatticeVector
    label: str = ""
    parents: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vwall", lv(self.vwall))
        validate_wall_function(self.func, self.vwall)
        if self.vwall not in (self.support.dir, -self.support.dir):
            raise GeometryError(
                f"wall vector {tuple(self.vwall)} is not parallel to support {tuple(self.support.dir)}"
            )

    @property
    def incoming(self) -> bool:
        return self.support.dir == -self.vwall

    @property
    def exponent(self) -> LatticeVector:
        """The primitive z-exponent ``-vwall`` of the wall function."""
        return -self.vwall


def validate_wall_function(func: ScatteringPolynomial, vwall: Sequence[int]) -> None:
    if func.constant_term() != 1:
        raise GeometryError("wall function must have constant term 1")
    m = (-vwall[0], -vwall[1])
    for (z, t, q), _ in func.items():
        if z == (0, 0):
            if any(t) or q:
                raise GeometryError("wall function has a z-free term besides the constant 1")
            continue
        if det(z, m) != 0 or z[0] * m[0] + z[1] * m[1] <= 0:
            raise GeometryError(f"wall function term z^{z} is not a positive multiple of {m}")
        if q:
            raise GeometryError("wall functions are classical")


@dataclass(frozen=True)
class ToricModel:
    fan: tuple[FanRay, ...]
    blowups: tuple[tuple[LatticeVector, CurveClass], ...]
    classes: tuple[str, ...] = DP4_CLASSES
    offsets: Mapping[int, Point] | None = None
    endpoint: Point | None = None
    name: str = ""

    def __post_init__(self):
        dirs = [f.dir for f in self.fan]
        if len(set(dirs)) != len(dirs):
            raise GeometryError("fan rays must have distinct directions")
        for d, _ in self.blowups:
            if lv(d) not in dirs:
                raise GeometryError(f"blowup on direction {tuple(d)} which is not a fan ray")
        exc = [e for _, e in self.blowups]
        if len(set(exc)) != len(exc):
            raise GeometryError("exceptional classes of blowups must be distinct")

    @property
    def rank(self) -> int:
        return len(self.classes)

    def exceptional_indices(self) -> tuple[int, ...]:
        """Basis positions carried by the non-toric exceptional classes."""
        idx = []
        for _, e in self.blowups:
            nz = [i for i, c in enumerate(e.coeffs) if c]
            idx.extend(nz)
        return tuple(sorted(set(idx)))


@dataclass(frozen=True)
class WallStructure:
    fan: tuple[FanRay, ...]
    walls: tuple[Wall, ...]
    classes: tuple[str, ...] = DP4_CLASSES
    exact: bool = True
    meta: Mapping = field(default_factory=dict, compare=False)

    @property
    def rank(self) -> int:
        return len(self.classes)

    def with_walls(self, walls: Iterable[Wall], **kw) -> WallStructure:
        return replace(self, walls=tuple(walls), **kw)


# --- normals and elementary transports ---------------------------------------


def primitive_normal(dir: Sequence[int], travel: Sequence[int]) -> LatticeVector:
    """Primitive ``n`` with ``<n, dir> = 0`` and ``<n, travel> < 0``."""
    n = LatticeVector(-dir[1], dir[0])
    pairing = n.dot(travel)
    if pairing == 0:
        raise GeometryError(f"travel direction {tuple(travel)} is tangent to {tuple(dir)}")
    return n if pairing < 0 else -n


def cross_wall(
    p: ScatteringPolynomial,
    w: Wall,
    travel: Sequence[int],
    bound: int,
    weights: Sequence[int] | None = None,
) -> ScatteringPolynomial:
    """Apply ``z^v -> f^<n,v> z^v`` termwise, ``f`` the wall function.

    Negative powers of ``f`` are series cut at ``bound``: by l1-norm of the
    class, or by the linear grade ``weights`` when given.
    """
    if not p.is_classical():
        raise AlgebraError("wall crossing acts on classical polynomials")
    n = primitive_normal(w.support.dir, travel)
    groups: dict[int, dict] = {}
    for key, c in p.items():
        z = key[0]
        groups.setdefault(n[0] * z[0] + n[1] * z[1], {})[key] = c
    acc = ScatteringPolynomial.zero(p.rank)
    for e, terms in sorted(groups.items()):
        power = (
            poly_pow_truncated(w.func, e, bound)
            if weights is None
            else poly_pow_graded(w.func, e, weights, bound)
        )
        acc = acc + poly_mul(ScatteringPolynomial(terms, rank=p.rank), power)
    return acc


def cross_kink(p: ScatteringPolynomial, fr: FanRay, travel: Sequence[int]) -> ScatteringPolynomial:
    """Twist each term ``t^beta z^v`` to ``t^(beta + <n,v> kink) z^v``."""
    n = primitive_normal(fr.dir, travel)
    kink = fr.kink.coeffs

    def twist(key, c):
        z, t, q = key
        e = n[0] * z[0] + n[1] * z[1]
        return (z, tuple(a + e * k for a, k in zip(t, kink)), q), c

    return p.map_terms(twist)


def truncation_weights(ws: WallStructure) -> tuple[int, ...] | None:
    """A linear grade on curve classes that is positive on every wall term.

    Weight -1 goes to each basis class that occurs in wall functions only
    with negative sign and in no kink (the exceptional classes of the
    non-toric blowups), so kink crossings preserve the grade.  Returns
    ``None`` when this does not give every wall term positive grade.
    """
    rank = ws.rank
    pos = [False] * rank
    neg = [False] * rank
    for w in ws.walls:
        for (_, t, _), _c in w.func.items():
            for i, a in enumerate(t):
                pos[i] |= a > 0
                neg[i] |= a < 0
    in_kink = [any(fr.kink.coeffs[i] for fr in ws.fan) for i in range(rank)]
    weights = tuple(-1 if neg[i] and not pos[i] and not in_kink[i] else 0 for i in range(rank))
    grade = lambda t: sum(a * b for a, b in zip(weights, t))
    for w in ws.walls:
        for (z, t, _), _c in w.func.items():
            if z != (0, 0) and grade(t) <= 0:
                return None
    return weights


# --- plane geometry helpers --------------------------------------------------


def ray_fan_hits(base: Point, d: Sequence[int], fan: Sequence[FanRay]) -> list[tuple[Fraction, int]]:
    """Parameters ``s`` at which the line ``base + s d`` meets each fan ray.

    Returns every hit (any sign of ``s``); passing through the origin raises.
    """
    hits = []
    for i, fr in enumerate(fan):
        f = fr.dir
        dd = det(d, f)
        if dd == 0:
            if det(base, f) == 0:
                raise GeometryError("support runs along a fan ray", base)
            continue
        r = (-base[0], -base[1])
        s = Fraction(det(r, f)) / dd
        rr = Fraction(det(r, d)) / dd
        if rr == 0:
            raise GeometryError("support passes through the origin", base)
        if rr > 0:
            hits.append((s, i))
    return hits


def transport_along(
    func: ScatteringPolynomial,
    base: Point,
    d: Sequence[int],
    s_from: Fraction | None,
    s_to: Fraction | None,
    fan: Sequence[FanRay],
) -> ScatteringPolynomial:
    """Move ``func`` along ``base + s d`` from ``s_from`` to ``s_to`` (``None`` is +infinity)."""
    inf = None
    forward = s_from is not inf and (s_to is inf or s_to > s_from)
    travel = tuple(d) if forward else (-d[0], -d[1])
    lo, hi = (s_from, s_to) if forward else (s_to, s_from)
    hits = []
    for s, i in ray_fan_hits(base, d, fan):
        if s == lo or (hi is not inf and s == hi):
            raise GeometryError("transport endpoint lies on a fan ray", (base[0] + s * d[0], base[1] + s * d[1]))
        if s > lo and (hi is inf or s < hi):
            hits.append((s, i))
    hits.sort(reverse=not forward)
    out = func
    for _, i in hits:
        out = cross_kink(out, fan[i], travel)
    return out


def local_function(w: Wall, s: Fraction, fan: Sequence[FanRay]) -> ScatteringPolynomial:
    """The wall function at parameter ``s`` along the support."""
    if s == 0:
        return w.func
    return transport_along(w.func, w.support.base, w.support.dir, Fraction(0), s, fan)


def line_intersection(
    p: Point, d: Sequence[int], q: Point, e: Sequence[int]
) -> tuple[Fraction, Fraction] | None:
    """Parameters ``(s, u)`` with ``p + s d = q + u e``; ``None`` if parallel."""
    dd = det(d, e)
    if dd == 0:
        return None
    r = (q[0] - p[0], q[1] - p[1])
    return Fraction(det(r, e)) / dd, Fraction(det(r, d)) / dd


def collinear_overlap(a: Ray, b: Ray, a_line: bool = False, b_line: bool = False) -> bool:
    """Whether two parallel supports share a segment (lines when flagged)."""
    if det(a.dir, b.dir) != 0:
        return False
    r = (b.base[0] - a.base[0], b.base[1] - a.base[1])
    if det(r, a.dir) != 0:
        return False
    if a_line or b_line:
        return True
    if a.dir == b.dir:
        return True
    return r[0] * a.dir[0] + r[1] * a.dir[1] >= 0


def is_on_fan(pt: Point, fan: Sequence[FanRay]) -> bool:
    if pt == ORIGIN:
        return True
    for fr in fan:
        f = fr.dir
        if det(pt, f) == 0 and pt[0] * f[0] + pt[1] * f[1] > 0:
            return True
    return False


def angle_cmp(u: Sequence[int], v: Sequence[int]) -> int:
    """Counterclockwise angular order starting from the positive x-axis."""

    def half(w):
        return 0 if (w[1] > 0 or (w[1] == 0 and w[0] > 0)) else 1

    hu, hv = half(u), half(v)
    if hu != hv:
        return hu - hv
    c = det(u, v)
    return -1 if c > 0 else (1 if c < 0 else 0)


angle_key = cmp_to_key(angle_cmp)


# --- wall structure construction ---------------------------------------------


def initial_function(exceptional: CurveClass, d: Sequence[int]) -> ScatteringPolynomial:
    return ScatteringPolynomial.one(len(exceptional.coeffs)) + ScatteringPolynomial.monomial(
        z=d, t=-exceptional
    )


def build_initial_walls(tm: ToricModel) -> WallStructure:
    """One incoming wall ``1 + t^(-E_i) z^(-v)`` per non-toric blowup, on the fan ray."""
    fan_dirs = {fr.dir for fr in tm.fan}
    walls = []
    for d, exc in tm.blowups:
        d = lv(d)
        if d not in fan_dirs:
            raise GeometryError(f"blowup on direction {tuple(d)} which is not a fan ray")
        label = exc.format(tm.classes)
        walls.append(Wall(Ray(ORIGIN, d), initial_function(exc, d), -d, label=label))
    return WallStructure(tuple(tm.fan), tuple(walls), tm.classes)


def default_offsets(ws: WallStructure, delta: Fraction = DEFAULT_DELTA) -> dict[int, Point]:
    """Move wall ``i`` by ``(i+1) * delta`` to its left and ``delta / (i+2)`` along itself.

    Distinct normal shifts separate walls on a common ray, and the small
    tangential shift keeps a base point off a fan ray perpendicular to its
    wall.
    """
    out = {}
    for i, w in enumerate(ws.walls):
        d = w.support.dir
        k = i + 1
        along = delta / (k + 1)
        out[i] = (-d[1] * k * delta + d[0] * along, d[0] * k * delta + d[1] * along)
    return out


def wall_function_at_infinity(w: Wall, fan: Sequence[FanRay]) -> ScatteringPolynomial:
    if w.support.base == ORIGIN:
        return w.func
    return transport_along(w.func, w.support.base, w.support.dir, Fraction(0), None, fan)


def perturb_walls(
    ws: WallStructure, offsets: Mapping[int, Sequence] | None = None, delta: Fraction = DEFAULT_DELTA
) -> WallStructure:
    """Translate wall base points, keeping each function fixed far out on its ray.

    The result is validated: supports of incoming walls are taken as full
    lines (they are extended during completion), and every pair of supports
    must meet transversally at a point shared by no third wall and lying on
    no fan ray.
    """
    if offsets is None:
        offsets = default_offsets(ws, delta)
    walls = list(ws.walls)
    for i, off in offsets.items():
        if not 0 <= i < len(walls):
            raise GeometryError(f"offset for unknown wall index {i}")
        w = walls[i]
        f_inf = wall_function_at_infinity(w, ws.fan)
        base = (w.support.base[0] + Fraction(off[0]), w.support.base[1] + Fraction(off[1]))
        new_support = Ray(base, w.support.dir)
        func = transport_along(f_inf, base, new_support.dir, None, Fraction(0), ws.fan)
        walls[i] = replace(w, support=new_support, func=func)
    out = ws.with_walls(walls)
    validate_generic(out)
    return out


def validate_generic(ws: WallStructure) -> None:
    """Check pairwise transversality of the (line-extended) initial supports."""
    supports = [(w.support, w.incoming) for w in ws.walls]
    for w in ws.walls:
        ray_fan_hits(w.support.base, w.support.dir, ws.fan)  # raises through origin / along fan
        if is_on_fan(w.support.base, ws.fan):
            raise GeometryError("wall base lies on a fan ray", w.support.base)
    points: dict[Point, list[int]] = {}
    n = len(supports)
    for i in range(n):
        ri, li = supports[i]
        for j in range(i + 1, n):
            rj, lj = supports[j]
            if collinear_overlap(ri, rj, li, lj):
                raise GeometryError(f"walls {i} and {j} are coincident", ri.base)
            hit = line_intersection(ri.base, ri.dir, rj.base, rj.dir)
            if hit is None:
                continue
            s, u = hit
            if (s < 0 and not li) or (u < 0 and not lj):
                continue
            if s == 0 or u == 0:
                raise GeometryError(f"wall {j if s == 0 else i} passes through a wall base", ri.at(s))
            pt = ri.at(s)
            if is_on_fan(pt, ws.fan):
                raise GeometryError(f"walls {i} and {j} meet on a fan ray", pt)
            points.setdefault(pt, []).append(i)
            points[pt].append(j)
    for pt, ids in sorted(points.items()):
        if len(set(ids)) > 2:
            raise GeometryError(f"walls {sorted(set(ids))} meet in a single point", pt)


# --- paths ---------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingEvent:
    """One transversal crossing along a path, ordered from infinity inward.

    For wall events ``wall`` is the crossed wall re-based at the crossing
    point, so ``wall.func`` is the local wall-crossing function there.
    """

    kind: str  # "wall" or "kink"
    index: int
    param: Fraction
    point: Point
    travel: LatticeVector
    wall: Wall | None = None
    fan_ray: FanRay | None = None


def path_crossings(ws: WallStructure, path_start_dir: Sequence[int], endpoint: Sequence) -> list[CrossingEvent]:
    """Crossings of the path coming from infinity along ``path_start_dir`` to ``endpoint``."""
    d = lv(path_start_dir)
    P = as_point(endpoint)
    travel = -d
    if is_on_fan(P, ws.fan):
        raise GeometryError("endpoint lies on a fan ray", P)
    path = Ray(P, d)
    events: list[CrossingEvent] = []
    for i, w in enumerate(ws.walls):
        hit = line_intersection(P, d, w.support.base, w.support.dir)
        if hit is None:
            if collinear_overlap(path, w.support):
                raise GeometryError(f"path runs along wall {i}", P)
            continue
        s, u = hit
        if u < 0 or s < 0:
            continue
        if s == 0:
            raise GeometryError(f"endpoint lies on wall {i}", P)
        if u == 0:
            raise GeometryError(f"path passes through the base of wall {i}", path.at(s))
        local = local_function(w, u, ws.fan)
        pt = path.at(s)
        events.append(
            CrossingEvent("wall", i, s, pt, travel, wall=replace(w, support=Ray(pt, w.support.dir), func=local))
        )
    for i, fr in enumerate(ws.fan):
        dd = det(d, fr.dir)
        if dd == 0:
            if det(P, fr.dir) == 0:
                raise GeometryError("path runs along a fan ray", P)
            continue
        s, r = line_intersection(P, d, ORIGIN, fr.dir)
        if r == 0 and s > 0:
            raise GeometryError("path passes through the origin", ORIGIN)
        if s > 0 and r > 0:
            events.append(CrossingEvent("kink", i, s, path.at(s), travel, fan_ray=fr))
    events.sort(key=lambda e: e.param, reverse=True)
    for a, b in zip(events, events[1:]):
        if a.param == b.param:
            raise GeometryError("path meets two walls or kinks at one point; move the endpoint", a.point)
    return events
