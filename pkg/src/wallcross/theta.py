"""Theta functions by monomial transport, relations, and elimination of a generator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import (
    CLASSICAL,
    DP4_CLASSES,
    QUANTUM,
    AlgebraError,
    LatticeVector,
    ScatteringPolynomial,
    format_qpower,
    poly_mul,
    truncate_graded,
)
from .geometry import (
    CrossingEvent,
    WallStructure,
    as_point,
    cross_kink,
    cross_wall,
    lv,
    path_crossings,
    truncation_weights,
)


class RelationError(ValueError):
    def __init__(self, message: str, remainder: ScatteringPolynomial | None = None):
        super().__init__(message if remainder is None else f"{message}: {remainder.format()}")
        self.remainder = remainder


@dataclass(frozen=True)
class ThetaFunction:
    index: int
    direction: LatticeVector
    local_expr: ScatteringPolynomial
    crossings: tuple[CrossingEvent, ...] = field(default=(), compare=False, repr=False)

    def wall_crossings(self) -> int:
        return sum(1 for e in self.crossings if e.kind == "wall")


@dataclass(frozen=True)
class Relation:
    """``theta_i theta_j = constant + sum_k coeffs[k] theta_k`` (or a q-commutator on the left)."""

    lhs: tuple[int, int]
    constant: ScatteringPolynomial
    coeffs: Mapping[int, ScatteringPolynomial]
    mode: str = CLASSICAL
    kind: str = "product"

    def rhs(self, exprs: Mapping[int, ScatteringPolynomial]) -> ScatteringPolynomial:
        out = self.constant
        for k, c in self.coeffs.items():
            out = out + poly_mul(c, exprs[k], QUANTUM)
        return out

    def lhs_value(self, exprs: Mapping[int, ScatteringPolynomial]) -> ScatteringPolynomial:
        i, j = self.lhs
        if self.kind == "qcommutator":
            from .quantum import q_commutator

            return q_commutator(exprs[i], exprs[j])
        return poly_mul(exprs[i], exprs[j], self.mode)

    def residual(self, exprs: Mapping[int, ScatteringPolynomial]) -> ScatteringPolynomial:
        return self.lhs_value(exprs) - self.rhs(exprs)

    def format(self, names: Sequence[str] = DP4_CLASSES) -> str:
        quantum = self.mode == QUANTUM
        th = "Th" if quantum else "th"
        i, j = self.lhs
        if self.kind == "qcommutator":
            left = f"q^{{1/2}} {th}{i}{th}{j} - q^{{-1/2}} {th}{j}{th}{i}"
        else:
            left = f"{th}{i}{th}{j}"
        parts = []
        if self.constant:
            parts.append(_format_coeff(self.constant, names, quantum, bare=True))
        for k in sorted(self.coeffs):
            parts.append(f"{_format_coeff(self.coeffs[k], names, quantum)} {th}{k}")
        return f"{left} = " + (" + ".join(parts) if parts else "0")


def q_antisymmetric_part(p: ScatteringPolynomial) -> tuple[int, ScatteringPolynomial] | None:
    """Write ``p = (q^{h/2} - q^{-h/2}) r`` with ``r`` free of q, if possible."""
    groups: dict[tuple, dict[int, int]] = {}
    for (z, t, q), c in p.items():
        groups.setdefault((z, t), {})[q] = c
    h = None
    r = {}
    for (z, t), qs in groups.items():
        if len(qs) != 2:
            return None
        lo, hi = sorted(qs)
        if lo != -hi or hi <= 0 or qs[hi] != -qs[lo] or (h is not None and hi != h):
            return None
        h = hi
        r[(z, t, 0)] = qs[hi]
    if h is None:
        return None
    return h, ScatteringPolynomial(r, rank=p.rank)


def _format_coeff(c: ScatteringPolynomial, names: Sequence[str], quantum: bool, bare: bool = False) -> str:
    split = q_antisymmetric_part(c) if quantum else None
    if split is None:
        text = c.format(names, quantum)
        return text if bare or len(c) == 1 else f"({text})"
    h, r = split
    bracket = f"({format_qpower(h)} - {format_qpower(-h)})"
    body = r.format(names, quantum)
    if body == "1":
        return bracket
    return f"{bracket} {body}" if len(r) == 1 else f"{bracket}({body})"


def transport_theta(
    ws: WallStructure, dir: Sequence[int], endpoint: Sequence, bound: int = 20, index: int = 0
) -> ThetaFunction:
    """Carry ``z^dir`` from infinity along ``dir`` to ``endpoint`` through every crossing.

    Far out along ``dir`` the theta function is the bare monomial, and a
    consistent structure transports theta functions by wall crossing, so
    this is exact.  Negative wall powers expand as series cut at ``bound``
    in a grade that is positive on every wall term; since the true theta
    function is a polynomial, the cut only removes terms that would cancel.
    """
    d = lv(dir)
    events = path_crossings(ws, d, as_point(endpoint))
    weights = truncation_weights(ws)
    p = ScatteringPolynomial.monomial(d, rank=ws.rank)
    for ev in events:
        if ev.kind == "wall":
            p = cross_wall(p, ev.wall, ev.travel, bound, weights)
        else:
            p = cross_kink(p, ev.fan_ray, ev.travel)
    if weights is not None:
        p = truncate_graded(p, weights, bound)
    return ThetaFunction(index, d, p, tuple(events))


def compute_theta_basis(ws: WallStructure, endpoint: Sequence, bound: int = 20) -> list[ThetaFunction]:
    """One theta function per fan ray, indexed 1.. in fan order."""
    return [transport_theta(ws, fr.dir, endpoint, bound, index=i + 1) for i, fr in enumerate(ws.fan)]


def default_weights(exprs: Sequence[ScatteringPolynomial]) -> tuple[int, ...]:
    """Grading weights: -1 on basis classes that only ever occur with negative sign.

    These are the exceptional classes of the non-toric blowups, whose
    negative powers are the deformation parameters; every theta function is
    its seed monomial plus terms of strictly positive degree.
    """
    rank = exprs[0].rank
    seen_pos = [False] * rank
    seen_neg = [False] * rank
    for p in exprs:
        for (_, t, _), _c in p.items():
            for idx, a in enumerate(t):
                seen_pos[idx] |= a > 0
                seen_neg[idx] |= a < 0
    return tuple(-1 if (seen_neg[i] and not seen_pos[i]) else 0 for i in range(rank))


def _grade(t: Sequence[int], weights: Sequence[int]) -> int:
    return sum(w * a for w, a in zip(weights, t))


def _seed_term(p: ScatteringPolynomial, direction: Sequence[int], weights: Sequence[int]):
    cands = [(k, c) for k, c in p.items() if k[0] == (direction[0], direction[1])]
    if not cands:
        raise RelationError(f"theta function has no seed term z^{tuple(direction)}", p)
    cands.sort(key=lambda kc: (_grade(kc[0][1], weights), kc[0]))
    return cands[0]


def reduce_in_basis(
    target: ScatteringPolynomial,
    basis: Mapping[int, tuple[Sequence[int], ScatteringPolynomial]],
    weights: Sequence[int] | None = None,
) -> tuple[ScatteringPolynomial, dict[int, ScatteringPolynomial]]:
    """Write ``target = constant + sum_k c_k basis_k`` with z-free ``c_k``.

    Greedy: the remaining term of lowest degree (then canonical order) is
    matched against the seed monomial of the basis element with that
    z-exponent; ``c_k`` multiplies from the left.  A term that cannot be
    matched, or a remainder pushed beyond the top degree of ``target``,
    means ``target`` is not in the span.
    """
    if weights is None:
        weights = default_weights([target] + [p for _, p in basis.values()])
    rank = target.rank
    seeds = {}
    for k, (direction, expr) in basis.items():
        (z, t, q), c = _seed_term(expr, direction, weights)
        if z in seeds:
            raise RelationError(f"two basis elements share the seed direction {z}")
        seeds[z] = (k, t, q, c)
    top = max((_grade(t, weights) for (_, t, _) in target.keys()), default=0)
    rem = target
    constant = ScatteringPolynomial.zero(rank)
    coeffs: dict[int, ScatteringPolynomial] = {}
    while rem:
        key, c = min(rem.items(), key=lambda kc: (_grade(kc[0][1], weights), kc[0]))
        z, t, q = key
        if _grade(t, weights) > top:
            raise RelationError("not expressible in theta basis", rem)
        if z == (0, 0):
            term = ScatteringPolynomial({key: c}, rank=rank)
            constant = constant + term
            rem = rem - term
            continue
        if z not in seeds:
            raise RelationError("not expressible in theta basis", rem)
        k, st, sq, sc = seeds[z]
        if c % sc:
            raise RelationError("seed coefficient does not divide remainder", rem)
        mu = ScatteringPolynomial.monomial(
            (0, 0), tuple(a - b for a, b in zip(t, st)), coeff=c // sc, qhalf=q - sq, rank=rank
        )
        coeffs[k] = coeffs.get(k, ScatteringPolynomial.zero(rank)) + mu
        rem = rem - poly_mul(mu, basis[k][1], QUANTUM)
    return constant, {k: v for k, v in sorted(coeffs.items()) if v}


def find_relation(
    thetas: Sequence,
    i: int,
    j: int,
    mode: str = CLASSICAL,
    weights: Sequence[int] | None = None,
) -> Relation:
    """Express the (ordered, in quantum mode) product ``theta_i theta_j`` in the theta basis."""
    exprs = theta_exprs(thetas)
    if mode not in (CLASSICAL, QUANTUM):
        raise AlgebraError(f"unknown mode {mode!r}")
    product = poly_mul(exprs[i], exprs[j], mode)
    basis = {th.index: (th.direction, exprs[th.index]) for th in thetas}
    constant, coeffs = reduce_in_basis(product, basis, weights)
    rel = Relation((i, j), constant, coeffs, mode)
    if rel.residual(exprs):
        raise RelationError("relation does not verify", rel.residual(exprs))
    return rel


def theta_exprs(thetas: Sequence) -> dict[int, ScatteringPolynomial]:
    out = {}
    for th in thetas:
        out[th.index] = th.local_expr if isinstance(th, ThetaFunction) else th.expr
    return out


# --- elimination -----------------------------------------------------------------

Word = tuple[int, ...]


@dataclass(frozen=True)
class WordPolynomial:
    """Noncommutative polynomial in theta generators with z-free coefficients."""

    terms: Mapping[Word, ScatteringPolynomial]
    rank: int = 6

    @classmethod
    def from_relation(cls, rel: Relation) -> WordPolynomial:
        """The relation as ``lhs - rhs`` (q-commutators are expanded into words)."""
        rank = rel.constant.rank
        terms: dict[Word, ScatteringPolynomial] = {}
        i, j = rel.lhs
        one = ScatteringPolynomial.one(rank)
        if rel.kind == "qcommutator":
            _acc(terms, (i, j), one.shift(qhalf=1))
            _acc(terms, (j, i), -one.shift(qhalf=-1))
        else:
            _acc(terms, (i, j), one)
        if rel.constant:
            _acc(terms, (), -rel.constant)
        for k, c in rel.coeffs.items():
            _acc(terms, (k,), -c)
        return cls(_clean(terms), rank)

    def generators(self) -> set[int]:
        return {g for w in self.terms for g in w}

    def __add__(self, other: WordPolynomial) -> WordPolynomial:
        terms = dict(self.terms)
        for w, c in other.terms.items():
            _acc(terms, w, c)
        return WordPolynomial(_clean(terms), self.rank)

    def scale(self, c: ScatteringPolynomial) -> WordPolynomial:
        return WordPolynomial(_clean({w: poly_mul(c, v, QUANTUM) for w, v in self.terms.items()}), self.rank)

    def concat(self, other: WordPolynomial) -> WordPolynomial:
        terms: dict[Word, ScatteringPolynomial] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                _acc(terms, w1 + w2, poly_mul(c1, c2, QUANTUM))
        return WordPolynomial(_clean(terms), self.rank)

    def substitute(self, gen: int, value: WordPolynomial) -> WordPolynomial:
        out = WordPolynomial({}, self.rank)
        for w, c in self.terms.items():
            piece = WordPolynomial({(): c}, self.rank)
            for g in w:
                factor = value if g == gen else WordPolynomial({(g,): ScatteringPolynomial.one(self.rank)}, self.rank)
                piece = piece.concat(factor)
            out = out + piece
        return out

    def evaluate(self, exprs: Mapping[int, ScatteringPolynomial], mode: str) -> ScatteringPolynomial:
        total = ScatteringPolynomial.zero(self.rank)
        for w, c in self.terms.items():
            val = c
            for g in w:
                val = poly_mul(val, exprs[g], mode)
            total = total + val
        return total

    def specialize_commutative(self) -> WordPolynomial:
        """q -> 1 on coefficients and sorted words (the commutative image)."""
        terms: dict[Word, ScatteringPolynomial] = {}
        for w, c in self.terms.items():
            _acc(terms, tuple(sorted(w)), c.specialize_q())
        return WordPolynomial(_clean(terms), self.rank)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def format(self, names: Sequence[str] = DP4_CLASSES, quantum: bool = False) -> str:
        th = "Th" if quantum else "th"
        pieces: list[tuple[str, str]] = []
        for w in sorted(self.terms, key=lambda w: (-len(w), w)):
            c = self.terms[w]
            sign = "+"
            if len(c) == 1 and next(c.items())[1] < 0:
                sign, c = "-", -c
            word = "".join(f"{th}{g}" for g in w)
            cf = c.format(names, quantum)
            if len(c) > 1:
                cf = f"({cf})"
            if not word:
                body = cf
            elif cf == "1":
                body = word
            else:
                body = f"{cf} {word}"
            pieces.append((sign, body))
        if not pieces:
            return "0 = 0"
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out + " = 0"

    def to_json(self, names: Sequence[str] = DP4_CLASSES) -> list[dict]:
        return [
            {"word": list(w), "coeff": self.terms[w].to_json(names)}
            for w in sorted(self.terms, key=lambda w: (-len(w), w))
        ]


def _acc(terms: dict, w: Word, c: ScatteringPolynomial) -> None:
    terms[w] = terms[w] + c if w in terms else c


def _clean(terms: Mapping[Word, ScatteringPolynomial]) -> dict[Word, ScatteringPolynomial]:
    return {w: c for w, c in sorted(terms.items()) if c}


def _invert_unit_monomial(c: ScatteringPolynomial) -> ScatteringPolynomial:
    if len(c) != 1:
        raise RelationError("eliminated generator's coefficient is not a single monomial", c)
    (z, t, q), coeff = next(c.items())
    if z != (0, 0) or coeff not in (1, -1):
        raise RelationError("eliminated generator's coefficient is not invertible", c)
    return ScatteringPolynomial.monomial((0, 0), tuple(-a for a in t), coeff=coeff, qhalf=-q, rank=c.rank)


def eliminate_theta4(relations: Sequence[Relation], target: int = 4) -> WordPolynomial:
    """Solve one relation for ``theta_target`` and substitute it into another.

    The solved relation must contain ``theta_target`` linearly on its right
    side with a unit-monomial coefficient ``b``; the result is multiplied by
    ``b`` so every coefficient stays a polynomial.  In quantum mode the
    substitution keeps word order, so ``theta_target`` is replaced in place.
    """
    solver = None
    for rel in relations:
        if target in rel.coeffs and target not in rel.lhs:
            try:
                b_inv = _invert_unit_monomial(rel.coeffs[target])
            except RelationError:
                continue
            solver = rel
            break
    if solver is None:
        raise RelationError(f"no relation expresses theta_{target} with an invertible coefficient")
    others = [r for r in relations if r is not solver and target in WordPolynomial.from_relation(r).generators()]
    if not others:
        raise RelationError(f"theta_{target} occurs in no other relation")
    rank = solver.constant.rank
    b = solver.coeffs[target]
    # lhs - rhs = 0 with rhs containing b*theta_target, so theta_target = b^{-1} (lhs - rest)
    rest = WordPolynomial.from_relation(solver) + WordPolynomial({(target,): b}, rank)
    value = rest.scale(b_inv)
    eliminated = WordPolynomial.from_relation(others[0]).substitute(target, value)
    return eliminated.scale(b)
