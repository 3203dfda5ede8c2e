"""Quantifier elimination for real-closed fields with an infinitesimal ``X``.

The core is the Cohen-Hörmander sign-matrix procedure in continuation
passing style.  Every polynomial whose only variable is ``X`` has its sign
fixed immediately by the positive-infinitesimal rule, so ``X`` is never
split on and never eliminated.  Linear equations in the eliminated
variable are solved by exact substitution before the sign-matrix machinery
runs.
"""
from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import MultiPoly, Sign, UniPoly, sparse_pseudo_remainder
from .errors import BudgetExceeded, NotGround, UnsupportedFragment
from .logic import (
    FALSE, TRUE, Add, And, Atom, Bottom, Exists, Forall, Formula, Iff, Implies,
    Mul, Neg, Not, Or, Quantifier, RatConst, Sort, StreamConst, Sub, Term, Top,
    Var, XConst, XRoot, conj, disj, free_vars, prenex,
)

XVAR = "X"
NZ = 2  # sign known to be nonzero, direction unknown
DEFAULT_BUDGET = 10**6


class _Inconsistent(Exception):
    """Raised when a branch's sign assumptions cannot all hold."""


# ---------------------------------------------------------------------------
# Polynomial atoms


@dataclass(frozen=True)
class PolyAtom(Formula):
    """``poly rel 0`` with ``rel`` one of EQ, LT, LE."""

    poly: MultiPoly
    rel: str

    def to_atom(self) -> Atom:
        return Atom(poly_to_term(self.poly), self.rel, RatConst(Fraction(0)))


def sign_at_infinitesimal(p) -> Sign:
    """Sign of a polynomial in ``X`` when ``X`` is a positive infinitesimal:
    the sign of its lowest-degree nonzero coefficient."""
    if isinstance(p, MultiPoly):
        extra = p.variables() - {XVAR}
        if extra:
            raise NotGround(f"{p} mentions {sorted(extra)}")
        p = p.to_uni(XVAR)
    if p.is_zero():
        return Sign.ZERO
    return Sign.of(p.low())


def _strip_x(p: MultiPoly) -> MultiPoly:
    """Divide out the largest power of ``X`` dividing ``p`` (sign-neutral)."""
    k = min((dict(m).get(XVAR, 0) for m in p.terms), default=0)
    if not k:
        return p
    out = {}
    for m, c in p.terms.items():
        d = dict(m)
        d[XVAR] -= k
        if not d[XVAR]:
            del d[XVAR]
        out[tuple(sorted(d.items()))] = c
    return MultiPoly(out)


def _x_only(p: MultiPoly) -> bool:
    return p.variables() <= {XVAR}


def mk_atom(p: MultiPoly, rel: str) -> Formula:
    """Normalised atom ``p rel 0``; ground atoms are evaluated at once."""
    if _x_only(p):
        s = sign_at_infinitesimal(p)
        return TRUE if _holds(rel, s) else FALSE
    p = _strip_x(p)
    if rel == "EQ":
        p, _ = p.normalized()
    else:
        p = p.primitive()
    return PolyAtom(p, rel)


def _holds(rel: str, s: int) -> bool:
    if rel == "EQ":
        return s == 0
    if rel == "LT":
        return s < 0
    if rel == "LE":
        return s <= 0
    raise ValueError(rel)


def negate(f: Formula) -> Formula:
    """Negation pushed to the literals; strict and weak atoms swap."""
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, PolyAtom):
        if f.rel == "EQ":
            return Not(f)
        return mk_atom(-f.poly, "LE" if f.rel == "LT" else "LT")
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, And):
        return disj(*(negate(a) for a in f.args))
    if isinstance(f, Or):
        return conj(*(negate(a) for a in f.args))
    if isinstance(f, Forall):
        return Exists(f.var, f.sort, negate(f.body))
    if isinstance(f, Exists):
        return Forall(f.var, f.sort, negate(f.body))
    if isinstance(f, Implies):
        return conj(pnf_nnf(f.left), negate(f.right))
    if isinstance(f, Iff):
        return negate(pnf_nnf(f))
    raise TypeError(f)


def pnf_nnf(f: Formula) -> Formula:
    """Negation normal form for formulas over :class:`PolyAtom`."""
    if isinstance(f, Not):
        return negate(pnf_nnf(f.arg))
    if isinstance(f, And):
        return conj(*(pnf_nnf(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(pnf_nnf(a) for a in f.args))
    if isinstance(f, Implies):
        return disj(negate(pnf_nnf(f.left)), pnf_nnf(f.right))
    if isinstance(f, Iff):
        a, b = pnf_nnf(f.left), pnf_nnf(f.right)
        return disj(conj(a, b), conj(negate(a), negate(b)))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, pnf_nnf(f.body))
    return f


def _is_literal(f) -> bool:
    return isinstance(f, PolyAtom) or (isinstance(f, Not) and isinstance(f.arg, PolyAtom))


def simplify(f: Formula) -> Formula:
    """Flatten, drop duplicates, detect complementary literals and remove
    literals fixed by their siblings."""
    return simplify_in_context(_simplify_basic(f))


def _simplify_basic(f: Formula) -> Formula:
    if isinstance(f, (And, Or)):
        is_and = isinstance(f, And)
        parts = []
        seen = set()
        for a in f.args:
            a = _simplify_basic(a)
            for b in (a.args if isinstance(a, type(f)) else (a,)):
                if b in seen:
                    continue
                seen.add(b)
                parts.append(b)
        for b in parts:
            if _is_literal(b) and negate(b) in seen:
                return FALSE if is_and else TRUE
        return conj(*parts) if is_and else disj(*parts)
    if isinstance(f, Not):
        return negate(_simplify_basic(f.arg)) if not isinstance(f.arg, PolyAtom) else f
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, _simplify_basic(f.body))
    return f


def _literal_value(ctx: dict, lit: Formula):
    neg_ = isinstance(lit, Not)
    atom = lit.arg if neg_ else lit
    s = findsign(ctx, atom.poly)
    if s is None:
        return None
    if s == NZ:
        val = False if atom.rel == "EQ" else None
    else:
        val = _holds(atom.rel, s)
    return val if val is None or not neg_ else not val


def simplify_in_context(f: Formula, ctx: dict | None = None) -> Formula:
    """Drop literals decided by sibling literals.

    Inside a conjunction the literal conjuncts are assumed; inside a
    disjunction their negations are.
    """
    ctx = {} if ctx is None else ctx
    if _is_literal(f):
        v = _literal_value(ctx, f)
        return f if v is None else (TRUE if v else FALSE)
    if not isinstance(f, (And, Or)):
        return f
    is_and = isinstance(f, And)
    lits, rest = [], []
    for a in f.args:
        a = simplify_in_context(a, ctx) if _is_literal(a) else a
        (lits if _is_literal(a) else rest).append(a)
    inner = ctx
    try:
        for lit in lits:
            inner = assume_literal(inner, lit if is_and else negate(lit))
    except _Inconsistent:
        return FALSE if is_and else TRUE
    rest = [simplify_in_context(a, inner) for a in rest]
    out = conj(*lits, *rest) if is_and else disj(*lits, *rest)
    return out if is_and else _merge_weak(out)


def _merge_weak(f: Formula) -> Formula:
    """``p = 0 \\/ p < 0`` becomes ``p <= 0``."""
    if not isinstance(f, Or):
        return f
    args = list(f.args)
    eqs = {a.poly.normalized()[0]: a for a in args if isinstance(a, PolyAtom) and a.rel == "EQ"}
    for i, a in enumerate(args):
        if isinstance(a, PolyAtom) and a.rel == "LT":
            e = eqs.get(a.poly.normalized()[0])
            if e is not None and e in args:
                args[i] = mk_atom(a.poly, "LE")
                args.remove(e)
    weak = {a.poly.normalized()[0] for a in args if isinstance(a, PolyAtom) and a.rel == "LE"}
    args = [a for a in args if not (isinstance(a, PolyAtom) and a.rel == "EQ"
                                    and a.poly.normalized()[0] in weak)]
    return disj(*args)


def poly_free_vars(f: Formula) -> set[str]:
    if isinstance(f, PolyAtom):
        return set(f.poly.variables()) - {XVAR}
    if isinstance(f, Quantifier):
        return poly_free_vars(f.body) - {f.var}
    out: set[str] = set()
    for c in _children(f):
        out |= poly_free_vars(c)
    return out


def _children(f):
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, Quantifier):
        return (f.body,)
    return ()


def map_poly_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, PolyAtom):
        return fn(f)
    if isinstance(f, Not):
        return negate(map_poly_atoms(f.arg, fn))
    if isinstance(f, And):
        return conj(*(map_poly_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return disj(*(map_poly_atoms(a, fn) for a in f.args))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, map_poly_atoms(f.body, fn))
    if isinstance(f, (Implies, Iff)):
        return type(f)(map_poly_atoms(f.left, fn), map_poly_atoms(f.right, fn))
    return f


# ---------------------------------------------------------------------------
# Terms <-> polynomials


def term_to_poly(t: Term) -> MultiPoly:
    """Polynomial image of a term.  Internally the variable ``X`` stands for
    the square root of the constant ``X``, so ``X`` itself maps to ``X^2``."""
    if isinstance(t, Var):
        return MultiPoly.var(t.name)
    if isinstance(t, XConst):
        return MultiPoly.var(XVAR, 2)
    if isinstance(t, XRoot):
        return MultiPoly.var(XVAR)
    if isinstance(t, RatConst):
        return MultiPoly.const(t.value)
    if isinstance(t, Add):
        return term_to_poly(t.left) + term_to_poly(t.right)
    if isinstance(t, Sub):
        return term_to_poly(t.left) - term_to_poly(t.right)
    if isinstance(t, Mul):
        return term_to_poly(t.left) * term_to_poly(t.right)
    if isinstance(t, Neg):
        return -term_to_poly(t.arg)
    if isinstance(t, StreamConst) and t.value.den == UniPoly([1]):
        return MultiPoly.from_uni(t.value.num, XVAR).substitute(XVAR, MultiPoly.var(XVAR, 2))
    raise UnsupportedFragment(f"term {type(t).__name__} must be expanded before elimination",
                              subterm=t)


def poly_to_term(p: MultiPoly, root_scale: bool = True) -> Term:
    """Term for ``p``; with ``root_scale`` the variable ``X`` is read as the
    square root of the constant ``X`` (the internal convention)."""
    if p.is_zero():
        return RatConst(Fraction(0))
    out = None
    for m, c in p.sorted_terms():
        factors = []
        for v, e in m:
            if v != XVAR:
                factors.extend([Var(v)] * e)
            elif root_scale:
                factors.extend([XConst()] * (e // 2) + [XRoot()] * (e % 2))
            else:
                factors.extend([XConst()] * e)
        mag = abs(c)
        if not factors:
            mono = RatConst(mag)
        else:
            mono = factors[0]
            for fct in factors[1:]:
                mono = Mul(mono, fct)
            if mag != 1:
                mono = Mul(RatConst(mag), mono)
        if out is None:
            out = mono if c > 0 else Neg(mono)
        else:
            out = Add(out, mono) if c > 0 else Sub(out, mono)
    return out


_FLIP = {"GE": "LE", "GT": "LT"}


def to_poly_formula(f: Formula) -> Formula:
    """Replace every term-level atom by a :class:`PolyAtom`."""
    if isinstance(f, Atom):
        if f.rel == "DIVIDES":
            raise UnsupportedFragment("divides must be expanded before elimination")
        if f.rel in _FLIP:
            return mk_atom(term_to_poly(f.rhs) - term_to_poly(f.lhs), _FLIP[f.rel])
        d = term_to_poly(f.lhs) - term_to_poly(f.rhs)
        if f.rel == "NEQ":
            return negate(mk_atom(d, "EQ"))
        return mk_atom(d, f.rel)
    if isinstance(f, Not):
        return Not(to_poly_formula(f.arg))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(to_poly_formula(a) for a in f.args))
    if isinstance(f, (Implies, Iff)):
        return type(f)(to_poly_formula(f.left), to_poly_formula(f.right))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, to_poly_formula(f.body))
    return f


def from_poly_formula(f: Formula) -> Formula:
    """Inverse of :func:`to_poly_formula` (atoms become ``p rel 0``)."""
    if isinstance(f, PolyAtom):
        return f.to_atom()
    if isinstance(f, Not):
        return Not(from_poly_formula(f.arg))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(from_poly_formula(a) for a in f.args))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, from_poly_formula(f.body))
    return f


# ---------------------------------------------------------------------------
# Sign contexts: normalised polynomial -> -1, 0, 1 or NZ


def _flip(s: int) -> int:
    return s if s in (0, NZ) else -s


def _key(p: MultiPoly):
    q, sg = _strip_x(p).normalized()
    return q, sg


def findsign(ctx: dict, p: MultiPoly):
    if p.is_zero():
        return 0
    if _x_only(p):
        return int(sign_at_infinitesimal(p))
    q, sg = _key(p)
    s = ctx.get(q)
    if s is None:
        return None
    return s if sg > 0 else _flip(s)


def assertsign(ctx: dict, p: MultiPoly, s: int) -> dict:
    known = findsign(ctx, p)
    if known is not None and (known == s or (s == NZ and known != 0)):
        return ctx
    if known is not None and not (known == NZ and s in (1, -1)):
        raise _Inconsistent
    if p.is_zero() or _x_only(p):
        raise _Inconsistent
    q, sg = _key(p)
    new = dict(ctx)
    new[q] = s if sg > 0 else _flip(s)
    return new


def assume_literal(ctx: dict, lit: Formula) -> dict:
    """Record what a literal says about sign; weak atoms carry nothing."""
    if isinstance(lit, PolyAtom):
        if lit.rel == "EQ":
            return assertsign(ctx, lit.poly, 0)
        if lit.rel == "LT":
            return assertsign(ctx, lit.poly, -1)
        return ctx
    if isinstance(lit, Not) and isinstance(lit.arg, PolyAtom) and lit.arg.rel == "EQ":
        return assertsign(ctx, lit.arg.poly, NZ)
    return ctx


# ---------------------------------------------------------------------------
# Statistics and budget


@dataclass
class QEStats:
    budget: int = DEFAULT_BUDGET
    polys: int = 0
    splits: int = 0
    substitutions: int = 0
    ch_calls: int = 0

    def charge(self, n: int) -> None:
        self.polys += n
        if self.polys > self.budget:
            raise BudgetExceeded(
                f"generated {self.polys} polynomials, budget {self.budget}",
                polys=self.polys, splits=self.splits)

    def as_dict(self) -> dict:
        return {"polys": self.polys, "splits": self.splits,
                "substitutions": self.substitutions, "ch_calls": self.ch_calls}


# ---------------------------------------------------------------------------
# Cohen-Hörmander sign matrices


class _SignMatrixEngine:
    """Sign matrices for polynomials in one variable ``x``.

    A matrix is a list of rows alternating interval, point, interval, ...
    ending in an interval; each row lists the sign of every polynomial.
    """

    def __init__(self, x: str, stats: QEStats):
        self.x = x
        self.stats = stats

    # -- case splits on parameter polynomials ---------------------------
    def split_zero(self, ctx, p, cont_z, cont_n):
        s = findsign(ctx, p)
        if s is not None:
            return cont_z(ctx) if s == 0 else cont_n(ctx)
        self.stats.splits += 1
        eq = mk_atom(p, "EQ")
        return disj(conj(eq, cont_z(assertsign(ctx, p, 0))),
                    conj(negate(eq), cont_n(assertsign(ctx, p, NZ))))

    def split_sign(self, ctx, p, cont):
        s = findsign(ctx, p)
        if s != NZ:
            return cont(ctx)
        self.stats.splits += 1
        pos = mk_atom(-p, "LT")
        return disj(conj(pos, cont(assertsign(ctx, p, 1))),
                    conj(negate(pos), cont(assertsign(ctx, p, -1))))

    def split_trichotomy(self, ctx, p, cont_z, cont_pn):
        return self.split_zero(ctx, p, cont_z,
                               lambda c: self.split_sign(c, p, cont_pn))

    # -- matrix construction ---------------------------------------------
    def casesplit(self, dun, pols, cont, ctx):
        if not pols:
            return self.matrix(dun, cont, ctx)
        p, ops = pols[0], pols[1:]
        x = self.x
        if p.degree(x) <= 0:
            after = lambda c: self.delconst(dun, p, ops, cont, c)  # noqa: E731
            return self.split_trichotomy(ctx, p, after, after)
        return self.split_trichotomy(
            ctx, p.head(x),
            lambda c: self.casesplit(dun, [p.behead(x)] + ops, cont, c),
            lambda c: self.casesplit(dun + [p], ops, cont, c))

    def delconst(self, dun, p, ops, cont, ctx):
        s = findsign(ctx, p)
        i = len(dun)

        def cont2(mat):
            return cont([row[:i] + [s] + row[i:] for row in mat])

        return self.casesplit(dun, ops, cont2, ctx)

    def pdivide_pos(self, ctx, s: MultiPoly, q: MultiPoly) -> MultiPoly:
        """Remainder of ``s`` by ``q`` whose sign equals that of ``s`` at
        every root of ``q``."""
        x = self.x
        if q.degree(x) <= 0:
            return MultiPoly()
        a = q.head(x)
        k, r = sparse_pseudo_remainder(s, q, x)
        sg = findsign(ctx, a)
        if sg == 0 or sg is None:
            raise AssertionError("divisor head has undetermined sign")
        if sg == 1 or k % 2 == 0:
            return r.primitive()
        if sg == -1:
            return (-r).primitive()
        return (a * r).primitive()

    def matrix(self, pols, cont, ctx):
        if not pols:
            try:
                return cont([[]])
            except _Inconsistent:
                return FALSE
        x = self.x
        degs = [p.degree(x) for p in pols]
        i = degs.index(max(degs))
        p = pols[i]
        qs = [p.derivative(x).primitive()] + pols[:i] + pols[i + 1:]
        gs = [self.pdivide_pos(ctx, p, q) for q in qs]
        self.stats.charge(len(qs) + len(gs))
        n = len(qs)

        def cont2(mat):
            return cont([row[1:i + 1] + [row[0]] + row[i + 1:] for row in mat])

        return self.casesplit([], qs + gs, lambda m: self.dedmatrix(cont2, m, n), ctx)

    # -- deduction of p's row -------------------------------------------
    @staticmethod
    def condense(rows):
        out = []
        for k in range(0, len(rows) - 1, 2):
            if 0 in rows[k + 1]:
                out += [rows[k], rows[k + 1]]
        out.append(rows[-1])
        return out

    @staticmethod
    def inferisign(rows):
        out = [rows[0]]
        for k in range(0, len(rows) - 2, 2):
            left, mid, right = rows[k], rows[k + 1], rows[k + 2]
            lo, hi = left[0], right[0]
            rest = mid[1:]
            if lo == 0 and hi == 0:
                raise _Inconsistent
            if NZ in (lo, hi):
                raise AssertionError("undetermined sign at a root")
            if lo == 0:
                out.append([hi] + rest)
            elif hi == 0 or lo == hi:
                out.append([lo] + rest)
            else:
                out += [[lo] + rest, [0] + rest, [hi] + rest]
            out.append(right)
        return out

    def dedmatrix(self, cont, mat, n):
        def infer(row):
            qsig, gsig = row[:n], row[n:]
            for j, s in enumerate(qsig):
                if s == 0:
                    return [gsig[j]] + qsig
            return [NZ] + qsig

        mat1 = self.condense([infer(r) for r in mat])
        ends = [[_flip(mat1[0][1])]] + mat1 + [[mat1[-1][1]]]
        mat3 = self.inferisign(ends)[1:-1]
        return cont(self.condense([[r[0]] + r[2:] for r in mat3]))


# ---------------------------------------------------------------------------
# Elimination of one existential quantifier


def _lit_poly(lit):
    return lit.poly if isinstance(lit, PolyAtom) else lit.arg.poly


def _eval_formula(f: Formula, signs: dict) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, PolyAtom):
        q, sg = _key(f.poly)
        s = signs[q]
        return _holds(f.rel, s if sg > 0 else -s)
    if isinstance(f, Not):
        return not _eval_formula(f.arg, signs)
    if isinstance(f, And):
        return all(_eval_formula(a, signs) for a in f.args)
    if isinstance(f, Or):
        return any(_eval_formula(a, signs) for a in f.args)
    raise TypeError(f)


def _atoms_of(f: Formula):
    if isinstance(f, PolyAtom):
        yield f
    for c in _children(f):
        yield from _atoms_of(c)


def substitute_linear(f: Formula, x: str, a: MultiPoly, b: MultiPoly) -> Formula:
    """Substitute ``x := -b/a`` (``a`` nonzero) and clear the denominator by an
    even power of ``a`` so that every relation keeps its direction."""

    def fn(atom: PolyAtom) -> Formula:
        cs = atom.poly.coefficients(x)
        d = len(cs) - 1
        if d <= 0:
            return atom
        e = d if atom.rel == "EQ" else d + (d % 2)
        acc = MultiPoly()
        nb = -b
        for i, c in enumerate(cs):
            if not c.is_zero():
                acc = acc + c * nb ** i * a ** (e - i)
        return mk_atom(acc, atom.rel)

    return map_poly_atoms(f, fn)


def _linear_candidate(lits, x, ctx):
    """Pick an equation linear in ``x``; prefer a known-nonzero coefficient."""
    best = None
    for lit in lits:
        if isinstance(lit, PolyAtom) and lit.rel == "EQ" and lit.poly.degree(x) == 1:
            cs = lit.poly.coefficients(x)
            a, b = cs[1], cs[0]
            s = findsign(ctx, a)
            if s in (1, -1, NZ):
                return lit, a, b, True
            if best is None or a.total_degree() < best[1].total_degree():
                best = (lit, a, b, False)
    return best


_DNF_LIMIT = 64


def _dnf(f: Formula):
    """List of conjunct lists, or ``None`` when larger than the limit."""
    if isinstance(f, Or):
        out = []
        for a in f.args:
            d = _dnf(a)
            if d is None:
                return None
            out.extend(d)
            if len(out) > _DNF_LIMIT:
                return None
        return out
    if isinstance(f, And):
        acc = [[]]
        for a in f.args:
            d = _dnf(a)
            if d is None or len(acc) * len(d) > _DNF_LIMIT:
                return None
            acc = [x + y for x in acc for y in d]
        return acc
    if isinstance(f, Top):
        return [[]]
    if isinstance(f, Bottom):
        return []
    return [[f]]


class Eliminator:
    """Quantifier elimination driver; holds options and statistics."""

    def __init__(self, budget: int = DEFAULT_BUDGET, presolve: bool = True):
        self.stats = QEStats(budget=budget)
        self.presolve = presolve

    # -- public --------------------------------------------------------------
    def qelim(self, f: Formula) -> Formula:
        """Eliminate every quantifier of a formula over :class:`PolyAtom`."""
        if isinstance(f, Quantifier):
            body = self.qelim(f.body)
            if isinstance(f, Exists):
                return self.exists(f.var, pnf_nnf(body))
            return negate(self.exists(f.var, negate(pnf_nnf(body))))
        if isinstance(f, Not):
            return negate(self.qelim(f.arg))
        if isinstance(f, And):
            return conj(*(self.qelim(a) for a in f.args))
        if isinstance(f, Or):
            return disj(*(self.qelim(a) for a in f.args))
        if isinstance(f, (Implies, Iff)):
            return self.qelim(pnf_nnf(f))
        return f

    def exists(self, x: str, f: Formula, ctx: dict | None = None) -> Formula:
        f = simplify(f)
        if x not in poly_free_vars(f):
            return f
        ctx = ctx or {}
        disjuncts = _dnf(f)
        if disjuncts is None:
            parts = list(f.args) if isinstance(f, Or) else [f]
            return simplify(disj(*(self._exists_general(x, p, ctx) for p in parts)))
        free = [d for d in disjuncts if not any(x in poly_free_vars(l) for l in d)]
        # disjuncts without x may be assumed false while treating the others
        base = ctx
        for d in free:
            if len(d) == 1 and _is_literal(d[0]):
                try:
                    base = assume_literal(base, negate(d[0]))
                except _Inconsistent:
                    return TRUE
        out = [conj(*d) for d in free]
        for d in disjuncts:
            if any(x in poly_free_vars(l) for l in d):
                out.append(self._exists_conj(x, d, base))
        return simplify(disj(*out))

    # -- internals -------------------------------------------------------------
    def _exists_conj(self, x, lits, ctx) -> Formula:
        outside = [l for l in lits if x not in poly_free_vars(l)]
        inside = [l for l in lits if x in poly_free_vars(l)]
        try:
            for l in outside:
                ctx = assume_literal(ctx, l)
        except _Inconsistent:
            return FALSE
        return conj(*outside, self._exists_inside(x, inside, ctx))

    def _exists_inside(self, x, lits, ctx) -> Formula:
        if not lits:
            return TRUE
        if self.presolve:
            cand = _linear_candidate(lits, x, ctx)
            if cand is not None:
                return self._solve_linear(x, lits, ctx, *cand)
        return self._ch(x, conj(*lits), ctx)

    def _solve_linear(self, x, lits, ctx, lit, a, b, known):
        self.stats.substitutions += 1
        rest = [l for l in lits if l is not lit]
        sub = simplify(substitute_linear(conj(*rest), x, a, b))
        if known:
            return sub
        # a may vanish: split on it
        nonzero = conj(negate(mk_atom(a, "EQ")), sub)
        try:
            zctx = assertsign(ctx, a, 0)
            zlits = [mk_atom(b, "EQ")] + rest
            zlits = [l for l in zlits if not isinstance(l, Top)]
            if any(isinstance(l, Bottom) for l in zlits):
                zero = FALSE
            else:
                zero = conj(mk_atom(a, "EQ"), self._exists_conj(x, zlits, zctx))
        except _Inconsistent:
            zero = FALSE
        return disj(nonzero, zero)

    def _exists_general(self, x, f, ctx) -> Formula:
        f = simplify(f)
        if x not in poly_free_vars(f):
            return f
        return self._ch(x, f, ctx)

    def _ch(self, x, f, ctx) -> Formula:
        self.stats.ch_calls += 1
        keys = []
        for atom in _atoms_of(f):
            q, _ = _key(atom.poly)
            if q not in keys:
                keys.append(q)

        def test(mat):
            for row in mat:
                if _eval_formula(f, dict(zip(keys, row))):
                    return TRUE
            return FALSE

        eng = _SignMatrixEngine(x, self.stats)
        self.stats.charge(len(keys))
        return simplify(eng.casesplit([], keys, test, ctx))


# ---------------------------------------------------------------------------
# Prenex problems and the linear presolve


@dataclass
class PrenexProblem:
    prefix: list          # [(Forall|Exists, name), ...] outermost first
    matrix: Formula       # quantifier-free, over PolyAtom
    params: set = field(default_factory=set)
    witnesses: list = field(default_factory=list)  # (var, numerator, denominator)

    def to_formula(self) -> Formula:
        f = self.matrix
        for q, v in reversed(self.prefix):
            f = q(v, Sort.L, f)
        return f


def to_prenex_problem(f: Formula) -> PrenexProblem:
    """Split a prenex formula over :class:`PolyAtom` into prefix and matrix."""
    prefix = []
    while isinstance(f, Quantifier):
        prefix.append((type(f), f.var))
        f = f.body
    matrix = pnf_nnf(f)
    bound = {v for _, v in prefix}
    return PrenexProblem(prefix, matrix, (poly_free_vars(matrix) - bound) | {XVAR})


def linear_presolve(pp: PrenexProblem) -> PrenexProblem:
    """Eliminate innermost-block variables fixed by a linear equation whose
    coefficient has a known nonzero sign."""
    prefix = list(pp.prefix)
    matrix = simplify(pp.matrix)
    witnesses = list(pp.witnesses)
    while prefix:
        q = prefix[-1][0]
        block = []
        for qq, v in reversed(prefix):
            if qq is not q:
                break
            block.append(v)
        work = matrix if q is Exists else negate(matrix)
        progress = False
        for v in block:
            lits = list(work.args) if isinstance(work, And) else [work]
            cand = _linear_candidate(lits, v, {})
            if cand is None or not cand[3]:
                if not any(v in poly_free_vars(l) for l in lits):
                    prefix.remove((q, v))
                    progress = True
                continue
            lit, a, b, _ = cand
            rest = [l for l in lits if l is not lit]
            work = simplify(substitute_linear(conj(*rest), v, a, b))
            witnesses.append((v, -b, a))
            prefix.remove((q, v))
            progress = True
        matrix = work if q is Exists else negate(work)
        if not progress:
            break
    return PrenexProblem(prefix, simplify(matrix), set(pp.params), witnesses)


# ---------------------------------------------------------------------------
# Entry points

_STACK_BYTES = 512 * 1024 * 1024


def _deep(fn, *args, **kwargs):
    """Run ``fn`` on a thread with a large stack; CPS recursion is deep."""
    box = {}

    def run():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 200000))
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    previous = threading.stack_size()
    threading.stack_size(_STACK_BYTES)
    try:
        t = threading.Thread(target=run)
        t.start()
        t.join()
    finally:
        threading.stack_size(previous)
    if "error" in box:
        raise box["error"]
    return box["value"]


def _all_nodes(f):
    yield f
    for c in _children(f):
        yield from _all_nodes(c)


def eliminate(f: Formula, budget: int = DEFAULT_BUDGET, presolve: bool = True,
              stats: QEStats | None = None) -> Formula:
    """Quantifier-free equivalent of ``f`` (pure ring language plus ``X``).

    Atoms mentioning only ``X`` are decided at the infinitesimal, so the
    result is equivalent in the intended structure.  The returned formula
    is made of ordinary atoms ``p rel 0`` when ``f`` is, and of
    :class:`PolyAtom` nodes when ``f`` already was a polynomial formula.
    """
    from . import expand

    logic_level = any(isinstance(a, Atom) for a in _all_nodes(f))
    g = to_poly_formula(prenex(expand.expand_all(f)[0])) if logic_level else f
    el = Eliminator(budget=budget, presolve=presolve)
    if stats is not None:
        el.stats = stats
        el.stats.budget = budget

    def work():
        h = pnf_nnf(g)
        if presolve and logic_level:
            h = linear_presolve(to_prenex_problem(h)).to_formula()
        return simplify(el.qelim(h))

    out = _deep(work)
    return from_poly_formula(out) if logic_level else out


def evaluate_qf(g: Formula) -> bool:
    """Truth value of a ground quantifier-free formula at ``X`` infinitesimal."""
    if isinstance(g, Top):
        return True
    if isinstance(g, Bottom):
        return False
    if isinstance(g, Atom):
        return evaluate_qf(to_poly_formula(g))
    if isinstance(g, PolyAtom):
        return _holds(g.rel, sign_at_infinitesimal(g.poly))
    if isinstance(g, Not):
        return not evaluate_qf(g.arg)
    if isinstance(g, And):
        return all(evaluate_qf(a) for a in g.args)
    if isinstance(g, Or):
        return any(evaluate_qf(a) for a in g.args)
    if isinstance(g, Implies):
        return (not evaluate_qf(g.left)) or evaluate_qf(g.right)
    if isinstance(g, Iff):
        return evaluate_qf(g.left) == evaluate_qf(g.right)
    raise NotGround(f"quantifier in {g}")


@dataclass
class Decision:
    status: str                    # VALID or INVALID
    stats: dict
    report: object = None          # ExpansionReport from the expansion phase
    residual: Formula | None = None
    witnesses: list = field(default_factory=list)
    elapsed: float = 0.0
    trace: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.status == "VALID"


def decide_full(f: Formula, budget: int = DEFAULT_BUDGET, presolve: bool = True) -> Decision:
    """Run the whole pipeline and keep diagnostics."""
    from . import expand
    from .errors import NotASentence

    t0 = time.perf_counter()
    fv = free_vars(f)
    if fv:
        raise NotASentence(f"free variables {sorted(fv)}")
    g, report = expand.expand_all(f)
    trace = list(report.trace)
    pf = pnf_nnf(to_poly_formula(prenex(g)))
    pp = to_prenex_problem(pf)
    witnesses = []
    if presolve:
        pp = linear_presolve(pp)
        witnesses = pp.witnesses
        trace.append(f"presolve: {len(pp.prefix)} quantifiers left")
    el = Eliminator(budget=budget, presolve=presolve)
    qf = _deep(lambda: simplify(el.qelim(pp.to_formula())))
    trace.append(f"eliminate: {el.stats.polys} polynomials, {el.stats.splits} splits")
    value = evaluate_qf(qf)
    return Decision("VALID" if value else "INVALID", el.stats.as_dict(), report,
                    qf, witnesses, time.perf_counter() - t0, trace)


def decide(f: Formula, budget: int = DEFAULT_BUDGET, presolve: bool = True) -> str:
    """``"VALID"`` or ``"INVALID"`` for a sentence of the extended language."""
    return decide_full(f, budget, presolve).status
