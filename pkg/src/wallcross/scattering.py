"""Completion of a perturbed wall structure and loop-consistency checks."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    CurveClass,
    LatticeVector,
    ScatteringPolynomial,
    anticanonical_degree,
    det,
    poly_mul,
    poly_pow_truncated,
)
from .geometry import (
    ORIGIN,
    Point,
    Ray,
    Wall,
    WallStructure,
    angle_key,
    as_point,
    collinear_overlap,
    cross_kink,
    cross_wall,
    fmt_point,
    is_on_fan,
    line_intersection,
    local_function,
    primitive_normal,
)

log = logging.getLogger(__name__)


class ScatteringError(ValueError):
    def __init__(self, message: str, point: Point | None = None, frontier: Sequence = ()):
        super().__init__(message if point is None else f"{message} at {fmt_point(point)}")
        self.point = point
        self.frontier = list(frontier)


@dataclass(frozen=True)
class IntersectionEvent:
    point: Point
    wall_ids: tuple[int, int]
    dets: int
    created: int | None = None


@dataclass
class ConsistencyReport:
    point: Point
    images: dict[str, ScatteringPolynomial]
    residuals: dict[str, ScatteringPolynomial]
    exact: bool
    consistent: bool
    crossings: list[str] = field(default_factory=list)


def single_factor(func: ScatteringPolynomial) -> tuple[int, tuple[int, ...], tuple[int, int]]:
    """Split ``1 + c t^beta z^m`` into ``(c, beta, m)``."""
    terms = [(k, c) for k, c in func.items() if k[0] != (0, 0)]
    if len(terms) != 1 or func.constant_term() != 1 or len(func) != 2:
        raise ScatteringError(f"wall function {func.format()} is not of the form 1 + c t^b z^m")
    (z, t, _), c = terms[0]
    return c, t, z


def _crossing_params(a: Wall, b: Wall):
    hit = line_intersection(a.support.base, a.support.dir, b.support.base, b.support.dir)
    if hit is None:
        return None
    s, u = hit
    if s < 0 or u < 0:
        return None
    return s, u


class _Completion:
    def __init__(self, ws: WallStructure, bound: int, max_walls: int):
        self.fan = ws.fan
        self.bound = bound
        self.max_walls = max_walls
        self.walls: list[Wall] = list(ws.walls)
        self.twins: set[frozenset[int]] = set()
        self.queue: list = []
        self.events: list[IntersectionEvent] = []
        self.frontier: list[dict] = []
        self.through: dict[Point, set[int]] = {}

    def _find(self, base: Point, d, func: ScatteringPolynomial) -> int | None:
        for k, w in enumerate(self.walls):
            if w.support.base == base and w.support.dir == d and w.func == func:
                return k
        return None

    def extend_incoming(self) -> None:
        for i, w in enumerate(list(self.walls)):
            if not w.incoming:
                continue
            done = self._find(w.support.base, w.vwall, w.func)
            if done is not None:
                # already extended by an earlier completion
                self.twins.add(frozenset((i, done)))
                continue
            ext = Wall(Ray(w.support.base, w.vwall), w.func, w.vwall, label=w.label + "'", parents=(i,))
            self.walls.append(ext)
            self.twins.add(frozenset((i, len(self.walls) - 1)))

    def related(self, i: int, j: int) -> bool:
        wi, wj = self.walls[i], self.walls[j]
        return frozenset((i, j)) in self.twins or j in wi.parents or i in wj.parents

    def scan(self, i: int, others: Sequence[int]) -> None:
        a = self.walls[i]
        for j in others:
            if j == i:
                continue
            b = self.walls[j]
            if det(a.support.dir, b.support.dir) == 0:
                if frozenset((i, j)) not in self.twins and collinear_overlap(a.support, b.support):
                    raise ScatteringError(f"walls {i} and {j} overlap", a.support.base)
                continue
            params = _crossing_params(a, b)
            if params is None:
                continue
            s, u = params
            pt = a.support.at(s)
            if s == 0 or u == 0:
                if self.related(i, j):
                    continue
                raise ScatteringError(f"wall base lies on wall {j if s == 0 else i}", pt)
            self.push(pt, i, s, j, u)

    def push(self, pt: Point, i: int, s: Fraction, j: int, u: Fraction) -> None:
        if is_on_fan(pt, self.fan):
            raise ScatteringError(f"walls {i} and {j} meet on a fan ray", pt)
        members = self.through.setdefault(pt, set())
        members.update((i, j))
        if len(members) > 2:
            raise ScatteringError(f"walls {sorted(members)} meet in a single point", pt)
        fi = local_function(self.walls[i], s, self.fan)
        fj = local_function(self.walls[j], u, self.fan)
        ci, ti, mi = single_factor(fi)
        cj, tj, mj = single_factor(fj)
        dets = det(mi, mj)
        if abs(dets) != 1:
            raise ScatteringError(f"non-unimodular intersection (det {dets}) of walls {i} and {j}", pt)
        beta = CurveClass(tuple(x + y for x, y in zip(ti, tj)))
        key = (anticanonical_degree(beta), pt, min(i, j), max(i, j))
        heapq.heappush(self.queue, (key, (i, j, dets, ci * cj, beta, (mi[0] + mj[0], mi[1] + mj[1]))))

    def run(self) -> None:
        self.extend_incoming()
        n = len(self.walls)
        for i in range(n):
            self.scan(i, range(i + 1, n))
        while self.queue:
            (deg, pt, _, _), (i, j, dets, coeff, beta, m) = heapq.heappop(self.queue)
            if deg > self.bound:
                self.frontier.append({"point": pt, "walls": (i, j), "class": beta, "degree": deg})
                continue
            if len(self.walls) >= self.max_walls:
                raise ScatteringError(
                    f"completion exceeded {self.max_walls} walls", pt, frontier=self.frontier
                )
            rank = len(beta.coeffs)
            func = ScatteringPolynomial.one(rank) + ScatteringPolynomial.monomial(z=m, t=beta, coeff=coeff)
            v = LatticeVector(-m[0], -m[1])
            if self._find(pt, v, func) is not None:
                continue
            label = f"{self.walls[i].label}|{self.walls[j].label}"
            new = Wall(Ray(pt, v), func, v, label=label, parents=(i, j))
            self.walls.append(new)
            k = len(self.walls) - 1
            self.through[pt].add(k)
            self.events.append(IntersectionEvent(pt, (i, j), dets, k))
            log.debug("inserted wall %d at %s: %s", k, fmt_point(pt), func.format())
            self.scan(k, range(k))
            # a new ray starting on some unrelated wall is a triple point
            for other, w in enumerate(self.walls[:k]):
                if other in (i, j):
                    continue
                if _contains(w, pt):
                    raise ScatteringError(f"walls {sorted({i, j, other})} meet in a single point", pt)


def _contains(w: Wall, pt: Point) -> bool:
    r = (pt[0] - w.support.base[0], pt[1] - w.support.base[1])
    return det(r, w.support.dir) == 0 and r[0] * w.support.dir[0] + r[1] * w.support.dir[1] >= 0


def complete_to_consistency(
    ws: WallStructure, bound: int = 20, max_walls: int = 2000, allow_truncated: bool = False
) -> WallStructure:
    """Insert walls at pairwise intersections until no unprocessed crossing is left.

    Incoming walls are first extended through their base points to full
    lines.  Each crossing of ``1 + a z^mi`` and ``1 + b z^mj`` (local
    functions, ``|det(mi, mj)| = 1``) emits the ray from the crossing point
    in direction ``-(mi + mj)`` with function ``1 + ab z^(mi + mj)``.
    Crossings are processed by increasing anticanonical degree of the new
    class, then by point.  New classes of degree above ``bound`` are left on
    the frontier, which is an error unless ``allow_truncated`` is set.
    """
    for w in ws.walls:
        single_factor(w.func)
    job = _Completion(ws, bound, max_walls)
    job.run()
    if job.frontier and not allow_truncated:
        raise ScatteringError(
            f"completion did not terminate within degree bound {bound}",
            job.frontier[0]["point"],
            frontier=job.frontier,
        )
    meta = dict(ws.meta)
    meta.update(events=job.events, frontier=job.frontier, bound=bound)
    return ws.with_walls(job.walls, exact=not job.frontier, meta=meta)


# --- consistency ---------------------------------------------------------------


def _half_rays(ws: WallStructure, pt: Point):
    """Half-rays leaving ``pt``: ``(direction, kind, object)``."""
    out = []
    for i, w in enumerate(ws.walls):
        base, d = w.support.base, w.support.dir
        r = (pt[0] - base[0], pt[1] - base[1])
        if det(r, d) != 0:
            continue
        s = Fraction(r[0] * d[0] + r[1] * d[1]) / (d[0] * d[0] + d[1] * d[1])
        if s < 0:
            continue
        local = local_function(w, s, ws.fan)
        out.append((tuple(d), "wall", (i, local)))
        if s > 0:
            out.append(((-d[0], -d[1]), "wall", (i, local)))
    if out and is_on_fan(pt, ws.fan):
        raise ScatteringError("wall intersection lies on a fan ray", pt)
    for i, fr in enumerate(ws.fan):
        f = fr.dir
        if pt == ORIGIN:
            out.append((tuple(f), "kink", (i, fr)))
        elif det(pt, f) == 0 and pt[0] * f[0] + pt[1] * f[1] > 0:
            out.append((tuple(f), "kink", (i, fr)))
            out.append(((-f[0], -f[1]), "kink", (i, fr)))
    out.sort(key=lambda h: angle_key(h[0]))
    for a, b in zip(out, out[1:]):
        if a[0] == b[0]:
            raise ScatteringError("two walls leave the point in the same direction", pt)
    return out


def _substitute(p: ScatteringPolynomial, f: ScatteringPolynomial, n: Sequence[int]):
    """Fraction-free image of ``p`` under ``z^v -> f^<n,v> z^v``: returns ``(f^K sigma(p), K)``."""
    exps = {z: n[0] * z[0] + n[1] * z[1] for z in p.zexps()}
    if not exps:
        return p, 0
    K = max(0, -min(exps.values()))
    powers: dict[int, ScatteringPolynomial] = {}
    acc = ScatteringPolynomial.zero(p.rank)
    for key, c in p.items():
        e = exps[key[0]] + K
        if e not in powers:
            powers[e] = poly_pow_truncated(f, e, 0)
        acc = acc + poly_mul(ScatteringPolynomial({key: c}, rank=p.rank), powers[e])
    return acc, K


def check_consistency_at_point(ws: WallStructure, pt: Sequence, bound: int = 20) -> ConsistencyReport:
    """Transport ``x`` and ``y`` once counterclockwise around an infinitesimal loop at ``pt``.

    ``images`` holds the series transport (negative powers truncated at
    ``bound``); the verdict is decided exactly by carrying numerator and
    denominator through the same crossings, so it does not depend on the
    truncation.  ``residuals`` are the series images minus the generators,
    restricted to classes of l1-norm at most ``bound``.
    """
    pt = as_point(pt)
    halves = _half_rays(ws, pt)
    rank = ws.rank
    gens = {"x": ScatteringPolynomial.monomial((1, 0), rank=rank), "y": ScatteringPolynomial.monomial((0, 1), rank=rank)}
    images, residuals = {}, {}
    exact_ok = True
    labels = []
    for d, kind, obj in halves:
        labels.append(f"{kind}:{obj[0]}@{d}")
    for name, g in gens.items():
        series = g
        num, den = g, ScatteringPolynomial.one(rank)
        for d, kind, obj in halves:
            travel = (-d[1], d[0])
            if kind == "kink":
                fr = obj[1]
                series = cross_kink(series, fr, travel)
                num = cross_kink(num, fr, travel)
                den = cross_kink(den, fr, travel)
                continue
            i, local = obj
            w = ws.walls[i]
            series = cross_wall(series, Wall(Ray(pt, w.support.dir), local, w.vwall), travel, bound)
            n = primitive_normal(w.support.dir, travel)
            num, kn = _substitute(num, local, n)
            den, kd = _substitute(den, local, n)
            num = poly_mul(num, poly_pow_truncated(local, kd, 0))
            den = poly_mul(den, poly_pow_truncated(local, kn, 0))
        images[name] = series
        residuals[name] = (series - g).truncate(bound)
        exact_ok = exact_ok and num == poly_mul(g, den)
    return ConsistencyReport(
        point=pt,
        images=images,
        residuals=residuals,
        exact=exact_ok,
        consistent=exact_ok,
        crossings=labels,
    )


def intersection_points(ws: WallStructure) -> list[Point]:
    """Every point where two non-parallel wall supports meet."""
    pts = set()
    walls = ws.walls
    for i in range(len(walls)):
        for j in range(i + 1, len(walls)):
            params = _crossing_params(walls[i], walls[j])
            if params is None:
                continue
            pts.add(walls[i].support.at(params[0]))
    return sorted(pts)


def consistency_audit(ws: WallStructure, bound: int = 20) -> list[ConsistencyReport]:
    return [check_consistency_at_point(ws, pt, bound) for pt in intersection_points(ws)]
