"""Exact sparse Laurent polynomials in q^{1/2}, t^{NE(X)^gp} and z^M.

A term is ``coeff * q^(qhalf/2) * t^tclass * z^zexp``.  Coefficients are
Python integers, q-exponents are stored doubled so half-integral powers stay
integral.  Polynomials multiply either commutatively or in the quantum torus
``z^v z^w = q^(det(v, w)/2) z^(v+w)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

DP4_CLASSES = ("H", "E1", "E2", "E3", "E4", "E5")

CLASSICAL = "classical"
QUANTUM = "quantum"


class AlgebraError(ValueError):
    pass


class LatticeVector(NamedTuple):
    """An element ``(a, b)`` of M = Z^2; ``x = z^(1,0)``, ``y = z^(0,1)``."""

    a: int
    b: int

    def __add__(self, other):  # type: ignore[override]
        return LatticeVector(self.a + other[0], self.b + other[1])

    def __sub__(self, other):
        return LatticeVector(self.a - other[0], self.b - other[1])

    def __neg__(self):
        return LatticeVector(-self.a, -self.b)

    def __mul__(self, k):  # type: ignore[override]
        return LatticeVector(self.a * k, self.b * k)

    __rmul__ = __mul__

    def det(self, other) -> int:
        return det(self, other)

    def dot(self, other) -> int:
        return self.a * other[0] + self.b * other[1]

    def is_primitive(self) -> bool:
        return (self.a, self.b) != (0, 0) and gcd(self.a, self.b) == 1


def det(v: Sequence[int], w: Sequence[int]) -> int:
    return v[0] * w[1] - v[1] * w[0]


@dataclass(frozen=True, order=True)
class CurveClass:
    """A class ``a H + sum c_i E_i`` in NE(X)^gp, stored by coefficients."""

    coeffs: tuple[int, ...]

    @classmethod
    def zero(cls, rank: int = 6) -> CurveClass:
        return cls((0,) * rank)

    @classmethod
    def from_dict(cls, data: Mapping[str, int], names: Sequence[str] = DP4_CLASSES) -> CurveClass:
        unknown = set(data) - set(names)
        if unknown:
            raise AlgebraError(f"unknown curve classes {sorted(unknown)}")
        return cls(tuple(int(data.get(n, 0)) for n in names))

    @classmethod
    def parse(cls, text: str, names: Sequence[str] = DP4_CLASSES) -> CurveClass:
        """Parse additive notation such as ``"2H-E1-E2"`` or ``"0"``."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls.zero(len(names))
        coeffs = dict.fromkeys(names, 0)
        pos = 0
        by_length = sorted(names, key=len, reverse=True)
        while pos < len(text):
            sign = 1
            if text[pos] in "+-":
                sign = -1 if text[pos] == "-" else 1
                pos += 1
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            mult = int(text[start:pos]) if pos > start else 1
            for name in by_length:
                if text.startswith(name, pos):
                    coeffs[name] += sign * mult
                    pos += len(name)
                    break
            else:
                raise AlgebraError(f"cannot parse curve class {text!r}")
        return cls(tuple(coeffs[n] for n in names))

    def __add__(self, other: CurveClass) -> CurveClass:
        return CurveClass(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: CurveClass) -> CurveClass:
        return CurveClass(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> CurveClass:
        return CurveClass(tuple(-x for x in self.coeffs))

    def scale(self, k: int) -> CurveClass:
        return CurveClass(tuple(k * x for x in self.coeffs))

    def l1(self) -> int:
        return sum(abs(x) for x in self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_dict(self, names: Sequence[str] = DP4_CLASSES) -> dict[str, int]:
        return {n: c for n, c in zip(names, self.coeffs) if c}

    def format(self, names: Sequence[str] = DP4_CLASSES) -> str:
        return format_class(self.coeffs, names)


def format_class(coeffs: Sequence[int], names: Sequence[str] = DP4_CLASSES) -> str:
    parts = []
    for name, c in zip(names, coeffs):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append(f"{sign}{mag}{name}")
    if not parts:
        return "0"
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


def anticanonical_degree(beta: CurveClass) -> int:
    """Intersection number with -K = 3H - sum E_i (first basis element is H)."""
    head, *rest = beta.coeffs
    return 3 * head + sum(rest)


# Internal key layout: (zexp, tclass, qhalf) with plain tuples.
Key = tuple[tuple[int, int], tuple[int, ...], int]


@dataclass(frozen=True)
class Monomial:
    coeff: int
    qhalf: int
    tclass: CurveClass
    zexp: LatticeVector


def quantum_monomial_product(m1: Monomial, m2: Monomial) -> Monomial:
    return Monomial(
        coeff=m1.coeff * m2.coeff,
        qhalf=m1.qhalf + m2.qhalf + det(m1.zexp, m2.zexp),
        tclass=m1.tclass + m2.tclass,
        zexp=m1.zexp + m2.zexp,
    )


def _add_t(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(s, t))


class ScatteringPolynomial:
    """Finite integer combination of monomials ``q^(k/2) t^beta z^v``.

    Instances are immutable; terms are kept in canonical form (no zero
    coefficients, one entry per key) and iterate in the fixed order
    (zexp, tclass, qhalf).
    """

    __slots__ = ("_terms", "rank")

    def __init__(self, terms: Mapping[Key, int] | Iterable[tuple[Key, int]] = (), rank: int = 6):
        acc: dict[Key, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, c in items:
            z, t, q = key
            if len(t) != rank:
                raise AlgebraError(f"curve class of length {len(t)} in rank-{rank} polynomial")
            k = ((int(z[0]), int(z[1])), tuple(int(x) for x in t), int(q))
            acc[k] = acc.get(k, 0) + int(c)
        self._terms = {k: acc[k] for k in sorted(acc) if acc[k] != 0}
        self.rank = rank

    @classmethod
    def _raw(cls, terms: dict[Key, int], rank: int) -> ScatteringPolynomial:
        # Trusted constructor for already-integral keys; still sorts and drops zeros.
        obj = cls.__new__(cls)
        obj._terms = {k: terms[k] for k in sorted(terms) if terms[k] != 0}
        obj.rank = rank
        return obj

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, rank: int = 6) -> ScatteringPolynomial:
        return cls._raw({}, rank)

    @classmethod
    def one(cls, rank: int = 6) -> ScatteringPolynomial:
        return cls.monomial(rank=rank)

    @classmethod
    def monomial(
        cls,
        z: Sequence[int] = (0, 0),
        t: CurveClass | Sequence[int] | None = None,
        coeff: int = 1,
        qhalf: int = 0,
        rank: int = 6,
    ) -> ScatteringPolynomial:
        if t is None:
            tt = (0,) * rank
        elif isinstance(t, CurveClass):
            tt = t.coeffs
        else:
            tt = tuple(t)
        return cls({((z[0], z[1]), tt, qhalf): coeff}, rank=len(tt))

    @classmethod
    def from_monomials(cls, monos: Iterable[Monomial], rank: int = 6) -> ScatteringPolynomial:
        return cls(
            [(((m.zexp[0], m.zexp[1]), m.tclass.coeffs, m.qhalf), m.coeff) for m in monos], rank=rank
        )

    # views ------------------------------------------------------------------
    def items(self) -> Iterator[tuple[Key, int]]:
        return iter(self._terms.items())

    def keys(self):
        return self._terms.keys()

    def terms(self) -> list[Monomial]:
        return [
            Monomial(c, q, CurveClass(t), LatticeVector(*z)) for (z, t, q), c in self._terms.items()
        ]

    def coefficient(self, z: Sequence[int], t: CurveClass | Sequence[int], qhalf: int = 0) -> int:
        tt = t.coeffs if isinstance(t, CurveClass) else tuple(t)
        return self._terms.get(((z[0], z[1]), tt, qhalf), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = ScatteringPolynomial.monomial(coeff=other, rank=self.rank)
        if not isinstance(other, ScatteringPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        return f"ScatteringPolynomial({self.format()!r})"

    def is_classical(self) -> bool:
        return all(q == 0 for (_, _, q) in self._terms)

    def is_z_free(self) -> bool:
        return all(z == (0, 0) for (z, _, _) in self._terms)

    def constant_term(self) -> int:
        return self._terms.get(((0, 0), (0,) * self.rank, 0), 0)

    def zexps(self) -> set[tuple[int, int]]:
        return {z for (z, _, _) in self._terms}

    # arithmetic -------------------------------------------------------------
    def _check_rank(self, other: ScatteringPolynomial) -> None:
        if self.rank != other.rank:
            raise AlgebraError("curve-class ranks differ")

    def __add__(self, other: ScatteringPolynomial | int) -> ScatteringPolynomial:
        if isinstance(other, int):
            other = ScatteringPolynomial.monomial(coeff=other, rank=self.rank)
        self._check_rank(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return ScatteringPolynomial._raw(acc, self.rank)

    __radd__ = __add__

    def __neg__(self) -> ScatteringPolynomial:
        return ScatteringPolynomial._raw({k: -c for k, c in self._terms.items()}, self.rank)

    def __sub__(self, other: ScatteringPolynomial | int) -> ScatteringPolynomial:
        return self + (-other)

    def __rsub__(self, other: int) -> ScatteringPolynomial:
        return (-self) + other

    def scale(self, k: int) -> ScatteringPolynomial:
        return ScatteringPolynomial._raw({key: k * c for key, c in self._terms.items()}, self.rank)

    def shift(self, z: Sequence[int] = (0, 0), t: Sequence[int] | None = None, qhalf: int = 0):
        """Multiply every term by the central-free monomial ``q^(qhalf/2) t^t z^z`` commutatively."""
        tt = tuple(t) if t is not None else (0,) * self.rank
        return ScatteringPolynomial._raw(
            {
                ((kz[0] + z[0], kz[1] + z[1]), _add_t(kt, tt), kq + qhalf): c
                for (kz, kt, kq), c in self._terms.items()
            },
            self.rank,
        )

    def mul(self, other: ScatteringPolynomial, mode: str = CLASSICAL) -> ScatteringPolynomial:
        return poly_mul(self, other, mode)

    def __mul__(self, other: ScatteringPolynomial | int) -> ScatteringPolynomial:
        if isinstance(other, int):
            return self.scale(other)
        return poly_mul(self, other, CLASSICAL)

    def __rmul__(self, other: int) -> ScatteringPolynomial:
        return self.scale(other)

    def map_terms(self, fn) -> ScatteringPolynomial:
        acc: dict[Key, int] = {}
        for key, c in self._terms.items():
            k2, c2 = fn(key, c)
            acc[k2] = acc.get(k2, 0) + c2
        return ScatteringPolynomial._raw(acc, self.rank)

    def truncate(self, bound: int) -> ScatteringPolynomial:
        """Drop terms whose curve class has l1-norm above ``bound``."""
        return ScatteringPolynomial._raw(
            {k: c for k, c in self._terms.items() if sum(map(abs, k[1])) <= bound}, self.rank
        )

    def specialize_q(self) -> ScatteringPolynomial:
        return self.map_terms(lambda k, c: ((k[0], k[1], 0), c))

    # serialization ----------------------------------------------------------
    def to_json(self, names: Sequence[str] = DP4_CLASSES) -> list[dict]:
        out = []
        for (z, t, q), c in self._terms.items():
            out.append(
                {
                    "coeff": c,
                    "qhalf": q,
                    "t": {n: v for n, v in zip(names, t) if v},
                    "z": [z[0], z[1]],
                }
            )
        return out

    @classmethod
    def from_json(cls, data: Sequence[Mapping], names: Sequence[str] = DP4_CLASSES) -> ScatteringPolynomial:
        terms = []
        for entry in data:
            t = CurveClass.from_dict(entry.get("t", {}), names).coeffs
            z = entry["z"]
            terms.append((((z[0], z[1]), t, int(entry.get("qhalf", 0))), int(entry["coeff"])))
        return cls(terms, rank=len(names))

    def format(self, names: Sequence[str] = DP4_CLASSES, quantum: bool | None = None) -> str:
        """Human-readable rendering, e.g. ``x^{-1}y^{-1} + t^{E1-E5} x^{-1}y^{-2}``."""
        if quantum is None:
            quantum = not self.is_classical()
        if not self._terms:
            return "0"
        pieces = []
        for (z, t, q), c in self._terms.items():
            factors = []
            if q:
                factors.append(format_qpower(q))
            if any(t):
                factors.append("t^{" + format_class(t, names) + "}")
            if z != (0, 0):
                factors.append(format_zexp(z, quantum))
            body = " ".join(factors)
            mag = abs(c)
            if not body:
                body = str(mag)
            elif mag != 1:
                body = f"{mag} {body}"
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out


def format_qpower(qhalf: int) -> str:
    if qhalf % 2 == 0:
        e = qhalf // 2
        return "q" if e == 1 else f"q^{{{e}}}"
    return f"q^{{{qhalf}/2}}"


def format_zexp(z: Sequence[int], quantum: bool = False) -> str:
    if quantum:
        return f"Z^({z[0]},{z[1]})"
    out = []
    for var, e in (("x", z[0]), ("y", z[1])):
        if e == 1:
            out.append(var)
        elif e:
            out.append(f"{var}^{{{e}}}")
    return "".join(out)


def poly_mul(
    p1: ScatteringPolynomial, p2: ScatteringPolynomial, mode: str = CLASSICAL
) -> ScatteringPolynomial:
    """Bilinear product; ``mode`` selects the commutative or quantum-torus rule."""
    if p1.rank != p2.rank:
        raise AlgebraError("curve-class ranks differ")
    if mode == CLASSICAL:
        if not (p1.is_classical() and p2.is_classical()):
            raise AlgebraError("classical product of polynomials with nonzero q-exponents")
        quantum = False
    elif mode == QUANTUM:
        quantum = True
    else:
        raise AlgebraError(f"unknown product mode {mode!r}")
    acc: dict[Key, int] = {}
    for (z1, t1, q1), c1 in p1._terms.items():
        for (z2, t2, q2), c2 in p2._terms.items():
            q = q1 + q2 + (z1[0] * z2[1] - z1[1] * z2[0] if quantum else 0)
            key = ((z1[0] + z2[0], z1[1] + z2[1]), _add_t(t1, t2), q)
            acc[key] = acc.get(key, 0) + c1 * c2
    return ScatteringPolynomial._raw(acc, p1.rank)


def _binom(e: int, k: int) -> int:
    """Generalized binomial coefficient C(e, k) for any integer e."""
    num = 1
    for i in range(k):
        num *= e - i
    den = 1
    for i in range(2, k + 1):
        den *= i
    return num // den


def poly_pow_truncated(p: ScatteringPolynomial, e: int, bound: int) -> ScatteringPolynomial:
    """``p**e`` for ``e >= 0``; for ``e < 0`` the binomial series of ``(1+u)**e``.

    The series is cut to terms whose curve class has l1-norm at most
    ``bound``.  Every term of ``u = p - 1`` must carry a nonzero class, so the
    expansion order is capped at ``bound // min_l1(u)``.
    """
    return _power(p, e, bound, lambda t: sum(map(abs, t)))


def poly_pow_graded(p: ScatteringPolynomial, e: int, weights: Sequence[int], bound: int) -> ScatteringPolynomial:
    """Like :func:`poly_pow_truncated`, but cut by the linear grade ``sum(w_i * t_i)``.

    A linear grade that is positive on ``p - 1`` makes the cut compatible
    with multiplication, so series computed this way are exact modulo
    terms of grade above ``bound``.
    """
    return _power(p, e, bound, lambda t: sum(w * a for w, a in zip(weights, t)))


def truncate_graded(p: ScatteringPolynomial, weights: Sequence[int], bound: int) -> ScatteringPolynomial:
    return ScatteringPolynomial._raw(
        {k: c for k, c in p.items() if sum(w * a for w, a in zip(weights, k[1])) <= bound}, p.rank
    )


def _power(p: ScatteringPolynomial, e: int, bound: int, grade) -> ScatteringPolynomial:
    if bound < 0:
        raise AlgebraError("truncation bound must be non-negative")
    one = ScatteringPolynomial.one(p.rank)
    if e >= 0:
        out = one
        base = p
        k = e
        while k:
            if k & 1:
                out = poly_mul(out, base)
            k >>= 1
            if k:
                base = poly_mul(base, base)
        return out
    if p.constant_term() != 1:
        raise AlgebraError("negative power needs a polynomial with constant term 1")
    u = p - one
    if not u:
        return one
    grades = [grade(t) for (_, t, _) in u.keys()]
    if min(grades) <= 0:
        raise AlgebraError("negative power needs every non-constant term to have positive degree")
    order = bound // min(grades)
    keep = lambda q: ScatteringPolynomial._raw({k: c for k, c in q.items() if grade(k[1]) <= bound}, q.rank)
    out = one
    power = one
    for k in range(1, order + 1):
        power = keep(poly_mul(power, u))
        if not power:
            break
        out = out + power.scale(_binom(e, k))
    return keep(out)
