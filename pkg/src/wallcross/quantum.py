"""Quantized theta functions, q-commutators and their relations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import (
    QUANTUM,
    LatticeVector,
    ScatteringPolynomial,
    poly_mul,
    poly_pow_graded,
    poly_pow_truncated,
    truncate_graded,
)
from .geometry import Wall, WallStructure, as_point, cross_kink, lv, path_crossings, primitive_normal, truncation_weights
from .scattering import single_factor
from .theta import Relation, RelationError, ThetaFunction, find_relation, reduce_in_basis


class QuantizationError(ValueError):
    pass


@dataclass(frozen=True)
class QuantumTheta:
    index: int
    expr: ScatteringPolynomial
    direction: LatticeVector | None = None


def quantize(theta: ThetaFunction, exact: bool = True) -> QuantumTheta:
    """Reinterpret every ``z^v`` as the quantum-torus generator; coefficients are untouched.

    This shortcut is only sound for a finite (exactly completed) structure,
    so pass ``exact=False`` for a truncated one and it is refused.  Even then
    it gives the quantum theta only where no path picks up a coefficient
    that deforms to a quantum integer (the preset endpoint is such a place);
    :func:`compute_quantum_theta_basis` works at any generic endpoint.
    """
    if not exact:
        raise QuantizationError("quantization needs an exactly completed wall structure")
    if not theta.local_expr.is_classical():
        raise QuantizationError(f"theta_{theta.index} already carries powers of q")
    return QuantumTheta(theta.index, theta.local_expr, theta.direction)


def _crossing_factor(
    u: ScatteringPolynomial, m, e: int, bound: int, weights: Sequence[int] | None
) -> ScatteringPolynomial:
    """Coefficients of ``z^(km)`` picked up by ``Z^v`` with ``<n,v> = e`` at a wall ``1 + u``.

    Conjugating by the quantum dilogarithm of ``u`` sends ``Z^v`` to
    ``Z^v prod_j (1 + q^(j+1/2) u)^(+-1)`` over ``j < |e|``.  Moving the
    powers of ``u`` past ``Z^v`` then multiplies ``u^k`` by ``q^(-k|e|/2)``,
    which leaves bar-invariant q-binomial coefficients; the result does not
    depend on the side from which the wall is crossed.
    """
    one = ScatteringPolynomial.one(u.rank)

    def degree(z) -> int:
        return z[0] // m[0] if m[0] else z[1] // m[1]

    if e < 0:
        base = poly_pow_truncated(one + u, -1, bound) if weights is None else poly_pow_graded(one + u, -1, weights, bound)
    else:
        base = one + u
    out = one
    for j in range(abs(e)):
        factor = base.map_terms(lambda key, c, j=j: ((key[0], key[1], key[2] + (2 * j + 1) * degree(key[0])), c))
        out = poly_mul(out, factor, QUANTUM)
    out = out.map_terms(lambda key, c: ((key[0], key[1], key[2] - abs(e) * degree(key[0])), c))
    if e >= 0:
        return out
    return out.truncate(bound) if weights is None else truncate_graded(out, weights, bound)


def quantum_cross_wall(
    p: ScatteringPolynomial,
    w: Wall,
    travel: Sequence[int],
    bound: int,
    weights: Sequence[int] | None = None,
) -> ScatteringPolynomial:
    """Quantum-torus wall crossing for a wall function ``1 + c t^beta z^m``.

    At ``q = 1`` this is ordinary wall crossing ``z^v -> f^<n,v> z^v``.
    """
    c, beta, m = single_factor(w.func)
    n = primitive_normal(w.support.dir, travel)
    u = ScatteringPolynomial.monomial(m, beta, coeff=c, rank=p.rank)
    factors: dict[int, ScatteringPolynomial] = {}
    acc = ScatteringPolynomial.zero(p.rank)
    for (z, t, qh), coeff in p.items():
        e = n[0] * z[0] + n[1] * z[1]
        if e not in factors:
            factors[e] = _crossing_factor(u, m, e, bound, weights)
        acc = acc + factors[e].shift(z, t, qh).scale(coeff)
    return acc


def transport_quantum_theta(
    ws: WallStructure, dir: Sequence[int], endpoint: Sequence, bound: int = 20, index: int = 0
) -> QuantumTheta:
    """Carry ``Z^dir`` from infinity to ``endpoint`` with quantum wall crossings."""
    d = lv(dir)
    weights = truncation_weights(ws)
    p = ScatteringPolynomial.monomial(d, rank=ws.rank)
    for ev in path_crossings(ws, d, as_point(endpoint)):
        if ev.kind == "wall":
            p = quantum_cross_wall(p, ev.wall, ev.travel, bound, weights)
        else:
            p = cross_kink(p, ev.fan_ray, ev.travel)
    if weights is not None:
        p = truncate_graded(p, weights, bound)
    return QuantumTheta(index, p, d)


def compute_quantum_theta_basis(
    ws: WallStructure,
    endpoint: Sequence,
    bound: int = 20,
    classical: Sequence[ThetaFunction] | None = None,
) -> list[QuantumTheta]:
    """Quantum theta functions at ``endpoint``, one per fan ray.

    With the classical thetas at the same endpoint, each quantum one is cut
    at the top grade of its classical counterpart.  Grades never drop along
    a path and quantum theta coefficients are positive, so nothing above
    that grade survives; this keeps long paths cheap.  The q = 1
    specialization is checked against the classical theta.
    """
    weights = truncation_weights(ws)
    out = []
    for i, fr in enumerate(ws.fan):
        cut = bound
        if classical is not None and weights is not None:
            cut = min(bound, max((sum(w * a for w, a in zip(weights, k[1])) for k in classical[i].local_expr.keys()), default=0))
        qt = transport_quantum_theta(ws, fr.dir, endpoint, cut, index=i + 1)
        if classical is not None and qt.expr.specialize_q() != classical[i].local_expr:
            raise QuantizationError(f"quantum theta_{i + 1} does not specialize to the classical one")
        out.append(qt)
    return out


def _expr(a) -> ScatteringPolynomial:
    return a.expr if isinstance(a, QuantumTheta) else a


def q_commutator(a, b) -> ScatteringPolynomial:
    """``q^{1/2} a b - q^{-1/2} b a`` in the quantum torus."""
    a, b = _expr(a), _expr(b)
    return poly_mul(a, b, QUANTUM).shift(qhalf=1) - poly_mul(b, a, QUANTUM).shift(qhalf=-1)


def specialize_classical(p: ScatteringPolynomial) -> ScatteringPolynomial:
    return p.specialize_q()


def commutator_relation(
    qthetas: Sequence[QuantumTheta], i: int, j: int, weights: Sequence[int] | None = None
) -> Relation:
    by_index = {th.index: th for th in qthetas}
    value = q_commutator(by_index[i], by_index[j])
    basis = {th.index: (th.direction, th.expr) for th in qthetas}
    constant, coeffs = reduce_in_basis(value, basis, weights)
    rel = Relation((i, j), constant, coeffs, QUANTUM, kind="qcommutator")
    if rel.residual({th.index: th.expr for th in qthetas}):
        raise RelationError("commutator relation does not verify")
    return rel


def relation_pairs(n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Opposite pairs (products and commutators), then cyclically adjacent pairs."""
    opposite = [(i, i + n // 2) for i in range(1, n // 2 + 1)] if n % 2 == 0 and n >= 4 else []
    adjacent = [(i, i % n + 1) for i in range(1, n + 1)] if n >= 3 else ([(1, 2)] if n == 2 else [])
    return opposite, adjacent


def find_quantum_relations(
    qthetas: Sequence[QuantumTheta],
    weights: Sequence[int] | None = None,
    products: Sequence[tuple[int, int]] | None = None,
    commutators: Sequence[tuple[int, int]] | None = None,
) -> list[Relation]:
    """Ordered-product relations followed by q-commutator relations.

    For four thetas the defaults are the products (1,3), (2,4) and the
    commutators (1,3), (2,4), (1,2), (2,3), (3,4), (4,1).
    """
    opposite, adjacent = relation_pairs(len(qthetas))
    products = opposite if products is None else products
    commutators = opposite + adjacent if commutators is None else commutators
    out = [find_relation(qthetas, i, j, QUANTUM, weights) for i, j in products]
    out += [commutator_relation(qthetas, i, j, weights) for i, j in commutators]
    return out
