"""Independent truth oracle for small real-arithmetic sentences.

Sentences have at most two quantified variables ``x`` (outer) and ``y``
(inner), with rational polynomials of degree at most two in each variable.
Truth over the reals is decided by a cylindrical sample-point argument:

* outer samples are the real roots of the projection set (all
  ``y``-coefficients, ``y``-discriminants and pairwise ``y``-resultants)
  together with rationals between and beyond them;
* over each outer sample the fibre polynomials are at most quadratic in
  ``y``, so their roots are computed in closed form and the inner samples
  are those roots plus points between and beyond them.

Signs of polynomials in ``x`` at an algebraic sample are exact (the sample
is a root of a known irreducible factor ``m``, and ``q(a) = 0`` iff ``m``
divides ``q``).  Fibre values are evaluated with 60-digit arithmetic; the
inputs are small enough that this is far beyond any separation needed.

This file deliberately shares no code with the package under test.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import sympy as sp

mpmath.mp.dps = 60
X, Y = sp.symbols("x y")
ZERO_EPS = mpmath.mpf(10) ** -35
RELS = ("=", "!=", "<", "<=", ">", ">=")


# ---------------------------------------------------------------------------
# Sentence representation and generation


@dataclass(frozen=True)
class OAtom:
    poly: sp.Expr
    rel: str


@dataclass(frozen=True)
class OBool:
    op: str  # "and", "or", "not"
    args: tuple


@dataclass(frozen=True)
class Sentence:
    quants: tuple  # (("forall"|"exists", "x"), ...) outermost first
    matrix: object

    def text(self) -> str:
        head = "".join(f"{q} {v}:L. " for q, v in self.quants)
        return head + _mtext(self.matrix)


def _ptext(p) -> str:
    s = sp.sstr(sp.expand(p), order="lex").replace("**", "^")
    return s


def _mtext(m) -> str:
    if isinstance(m, OAtom):
        return f"{_ptext(m.poly)} {m.rel} 0"
    if m.op == "not":
        return f"~({_mtext(m.args[0])})"
    sep = " /\\ " if m.op == "and" else " \\/ "
    return "(" + sep.join(_mtext(a) for a in m.args) + ")"


def _random_poly(rng: random.Random, names) -> sp.Expr:
    syms = [X if n == "x" else Y for n in names]
    monos = [sp.Integer(1)]
    for s in syms:
        monos += [s, s**2]
    if len(syms) == 2:
        monos += [syms[0] * syms[1]]
    k = rng.randint(1, 3)
    chosen = rng.sample(monos, k)
    p = sum(rng.choice([-3, -2, -1, 1, 2, 3]) * m for m in chosen)
    if p.free_symbols == set():
        p = p + syms[0]
    return sp.expand(p)


def random_sentence(rng: random.Random) -> Sentence:
    nq = rng.choice([1, 2, 2])
    names = ["x", "y"][:nq]
    quants = tuple((rng.choice(["forall", "exists"]), n) for n in names)
    atoms = [OAtom(_random_poly(rng, names), rng.choice(RELS))
             for _ in range(rng.randint(1, 3))]
    m = atoms[0]
    for a in atoms[1:]:
        m = OBool(rng.choice(["and", "or"]), (m, a))
    if rng.random() < 0.2:
        m = OBool("not", (m,))
    return Sentence(quants, m)


# ---------------------------------------------------------------------------
# Evaluation


def _rel_holds(s: int, rel: str) -> bool:
    return {"=": s == 0, "!=": s != 0, "<": s < 0, "<=": s <= 0,
            ">": s > 0, ">=": s >= 0}[rel]


def _eval_matrix(m, sign_of) -> bool:
    if isinstance(m, OAtom):
        return _rel_holds(sign_of(m.poly), m.rel)
    if m.op == "not":
        return not _eval_matrix(m.args[0], sign_of)
    vals = (_eval_matrix(a, sign_of) for a in m.args)
    return all(vals) if m.op == "and" else any(vals)


def _atoms(m):
    if isinstance(m, OAtom):
        yield m
    else:
        for a in m.args:
            yield from _atoms(a)


@dataclass(frozen=True)
class Point:
    """A real number: exact rational, or a root of an irreducible ``m``."""

    approx: mpmath.mpf
    exact: Fraction | None = None
    minpoly: sp.Poly | None = None

    def sign(self, q: sp.Poly) -> int:
        """Exact sign of a univariate rational polynomial at this point."""
        if q.is_zero:
            return 0
        if self.exact is not None:
            v = q.eval(sp.Rational(self.exact.numerator, self.exact.denominator))
            return int(sp.sign(v))
        if q.rem(self.minpoly).is_zero:
            return 0
        v = _peval(q, self.approx)
        return 1 if v > 0 else -1


def _peval(q: sp.Poly, at) -> mpmath.mpf:
    acc = mpmath.mpf(0)
    for c in q.all_coeffs():
        acc = acc * at + mpmath.mpf(sp.Rational(c).p) / sp.Rational(c).q
    return acc


def _between(a: Fraction | float, b) -> Fraction:
    return (Fraction(a) + Fraction(b)) / 2


def _rational_near(v: mpmath.mpf) -> Fraction:
    return Fraction(str(mpmath.nstr(v, 40))).limit_denominator(10**30)


def _samples_from_roots(roots: list) -> list:
    """Roots plus exact rationals strictly between and beyond them."""
    roots = sorted(roots, key=lambda p: p.approx)
    merged: list = []
    for r in roots:
        if merged and abs(merged[-1].approx - r.approx) < ZERO_EPS:
            continue
        merged.append(r)
    pts: list = []
    if not merged:
        return [Point(mpmath.mpf(0), Fraction(0))]
    lo = _rational_near(merged[0].approx) - 1
    pts.append(Point(mpmath.mpf(lo.numerator) / lo.denominator, lo))
    for a, b in zip(merged, merged[1:]):
        pts.append(a)
        mid = _rational_strictly_between(a.approx, b.approx)
        pts.append(Point(mpmath.mpf(mid.numerator) / mid.denominator, mid))
    pts.append(merged[-1])
    hi = _rational_near(merged[-1].approx) + 1
    pts.append(Point(mpmath.mpf(hi.numerator) / hi.denominator, hi))
    return pts


def _rational_strictly_between(a, b) -> Fraction:
    d = 10
    while True:
        mid = Fraction(str(mpmath.nstr((a + b) / 2, d)))
        m = mpmath.mpf(mid.numerator) / mid.denominator
        if a < m < b:
            return mid
        d += 10


def _univariate_points(polys) -> list:
    roots = []
    for p in polys:
        p = sp.Poly(p, X)
        if p.degree() <= 0:
            continue
        for fac, _ in p.factor_list()[1]:
            if fac.degree() < 1:
                continue
            for r in sp.Poly(fac, X).real_roots():
                if r.is_Rational:
                    roots.append(Point(mpmath.mpf(r.p) / r.q, Fraction(int(r.p), int(r.q))))
                else:
                    approx = mpmath.mpf(str(sp.N(r, 70)))
                    roots.append(Point(approx, None, sp.Poly(fac, X)))
    return _samples_from_roots(roots)


def _projection(polys) -> list:
    out = []
    ys = [sp.Poly(p, Y) for p in polys]
    for p in ys:
        out.extend(c for c in p.all_coeffs())
        if p.degree() >= 2:
            out.append(sp.discriminant(p.as_expr(), Y))
    for i in range(len(ys)):
        for j in range(i + 1, len(ys)):
            if ys[i].degree() >= 1 and ys[j].degree() >= 1:
                out.append(sp.resultant(ys[i].as_expr(), ys[j].as_expr(), Y))
    return [sp.expand(e) for e in out if sp.expand(e).free_symbols]


def _fibre_roots(polys, a: Point) -> list:
    """Real roots in ``y`` of every ``p(a, y)`` as high-precision numbers."""
    roots = []
    for p in polys:
        cs = [sp.Poly(c, X) for c in sp.Poly(p, Y).all_coeffs()]
        cs = [c for c in cs]
        while cs and a.sign(cs[0]) == 0:
            cs = cs[1:]
        if len(cs) <= 1:
            continue
        vals = [_peval(c, a.approx) if a.exact is None else
                mpmath.mpf(c.eval(sp.Rational(a.exact.numerator, a.exact.denominator)).p)
                / c.eval(sp.Rational(a.exact.numerator, a.exact.denominator)).q
                for c in cs]
        if len(cs) == 2:
            roots.append(-vals[1] / vals[0])
            continue
        A, B, C = vals
        disc_poly = sp.Poly(sp.expand(cs[1].as_expr() ** 2 - 4 * cs[0].as_expr() * cs[2].as_expr()), X)
        s = a.sign(disc_poly)
        if s < 0:
            continue
        if s == 0:
            roots.append(-B / (2 * A))
            continue
        d = mpmath.sqrt(B * B - 4 * A * C)
        roots += [(-B - d) / (2 * A), (-B + d) / (2 * A)]
    return roots


def _fibre_sign(p, a: Point, yv) -> int:
    expr = sp.Poly(p, X, Y)
    acc = mpmath.mpf(0)
    for (i, j), c in expr.terms():
        acc += mpmath.mpf(sp.Rational(c).p) / sp.Rational(c).q * a.approx**i * yv**j
    if abs(acc) < ZERO_EPS:
        return 0
    return 1 if acc > 0 else -1


def _fibre_samples(roots: list) -> list:
    roots = sorted(roots)
    merged = []
    for r in roots:
        if merged and abs(merged[-1] - r) < ZERO_EPS:
            continue
        merged.append(r)
    if not merged:
        return [mpmath.mpf(0)]
    pts = [merged[0] - 1]
    for a, b in zip(merged, merged[1:]):
        pts += [a, (a + b) / 2]
    pts += [merged[-1], merged[-1] + 1]
    return pts


def truth(s: Sentence) -> bool:
    polys = [a.poly for a in _atoms(s.matrix)]
    if len(s.quants) == 1:
        (q, _), = s.quants
        pts = _univariate_points(polys)
        vals = (_eval_matrix(s.matrix, lambda p, pt=pt: pt.sign(sp.Poly(p, X))) for pt in pts)
        return any(vals) if q == "exists" else all(vals)
    (q1, _), (q2, _) = s.quants
    outer = _univariate_points(_projection(polys) + [p for p in polys if not p.has(Y)])

    def inner(a: Point) -> bool:
        ys = _fibre_samples(_fibre_roots(polys, a))
        vals = (_eval_matrix(s.matrix, lambda p, yv=yv: _fibre_sign(p, a, yv)) for yv in ys)
        return any(vals) if q2 == "exists" else all(vals)

    vals = (inner(a) for a in outer)
    return any(vals) if q1 == "exists" else all(vals)
