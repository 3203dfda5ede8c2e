"""Compile the extended stream language down to ordered-ring formulas in ``X``.

Steps, in pipeline order:

* ``push_hd_tl`` moves ``hd``/``tl`` inward and evaluates them on constants;
* ``expand_constants`` clears the denominators of ``[[p/q]]`` constants;
* ``eliminate_hd_tl`` removes the remaining stream destructors;
* ``expand_divides`` rewrites divisibility as an equation with a witness;
* ``relativize`` turns ``S``-sorted quantifiers into guarded ``L`` ones.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import streams
from .algebra import MultiPoly, UniPoly
from .errors import UnsupportedFragment
from .logic import (
    FALSE, TRUE, Add, And, Atom, Bottom, Cons, Exists, Forall, Formula, Hd,
    Implies, Mul, Neg, Not, Or, Quantifier, RatConst, Sort, StreamConst, Sub,
    Term, Tl, Top, Var, XConst, XRoot, all_names, conj, disj, fresh_name, neg, nnf,
    substitute,
)


@dataclass
class ExpansionReport:
    introduced_vars: list = field(default_factory=list)
    applied_rules: list = field(default_factory=list)
    residual_ops: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def success(self) -> bool:
        return not self.residual_ops

    def note(self, rule: str, detail: str = "") -> None:
        self.applied_rules.append(rule)
        self.trace.append(f"{rule}: {detail}" if detail else rule)


# ---------------------------------------------------------------------------
# Small term constructors that fold constants


ZERO_T = RatConst(Fraction(0))
ONE_T = RatConst(Fraction(1))


def _is_const(t: Term, v=None) -> bool:
    return isinstance(t, RatConst) and (v is None or t.value == v)


def t_add(a: Term, b: Term) -> Term:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return RatConst(a.value + b.value)
    return Add(a, b)


def t_sub(a: Term, b: Term) -> Term:
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return RatConst(a.value - b.value)
    return Sub(a, b)


def t_mul(a: Term, b: Term) -> Term:
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO_T
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return RatConst(a.value * b.value)
    return Mul(a, b)


def t_neg(a: Term) -> Term:
    if _is_const(a):
        return RatConst(-a.value)
    return Neg(a)


def uni_to_term(p: UniPoly) -> Term:
    out: Term = ZERO_T
    for i, c in enumerate(p.coeffs):
        if not c:
            continue
        negate = c < 0 and not _is_const(out, 0)
        mono: Term = RatConst(-c if negate else c)
        for _ in range(i):
            mono = t_mul(mono, XConst())
        out = t_sub(out, mono) if negate else t_add(out, mono)
    return out


def _const_term(f: streams.LaurentRational) -> Term:
    if f.den == UniPoly([1]) and f.num.degree <= 0:
        return RatConst(f.num[0])
    return StreamConst(f)


# ---------------------------------------------------------------------------
# Pushing hd and tl inward


def _chain_base(t: Term):
    """``(var, depth)`` when ``t`` is ``tl^depth(var)``, else ``None``."""
    k = 0
    while isinstance(t, Tl):
        t = t.arg
        k += 1
    return (t.name, k) if isinstance(t, Var) else None


def push_hd_tl(t: Term, report: ExpansionReport | None = None) -> Term:
    """Normal form in which ``hd``/``tl`` apply only to variables or
    ``tl``-chains, and ``cons`` is gone."""
    if isinstance(t, Cons):
        if report:
            report.note("cons", "cons(r, t) -> r + X*t")
        return push_hd_tl(Add(t.head, Mul(XConst(), t.tail)), report)
    if isinstance(t, Hd):
        return _hd(push_hd_tl(t.arg, report), report)
    if isinstance(t, Tl):
        return _tl(push_hd_tl(t.arg, report), report)
    if isinstance(t, Add):
        return t_add(push_hd_tl(t.left, report), push_hd_tl(t.right, report))
    if isinstance(t, Sub):
        return t_sub(push_hd_tl(t.left, report), push_hd_tl(t.right, report))
    if isinstance(t, Mul):
        return t_mul(push_hd_tl(t.left, report), push_hd_tl(t.right, report))
    if isinstance(t, Neg):
        return t_neg(push_hd_tl(t.arg, report))
    return t


def _hd(t: Term, report) -> Term:
    if isinstance(t, (Var, Tl)):
        return Hd(t)
    if isinstance(t, Hd) or isinstance(t, RatConst):
        return t
    if isinstance(t, XConst):
        return ZERO_T
    if isinstance(t, StreamConst):
        if report:
            report.note("hd-const", str(t.value))
        return RatConst(streams.hd(t.value))
    if isinstance(t, Add):
        return t_add(_hd(t.left, report), _hd(t.right, report))
    if isinstance(t, Sub):
        return t_sub(_hd(t.left, report), _hd(t.right, report))
    if isinstance(t, Neg):
        return t_neg(_hd(t.arg, report))
    if isinstance(t, Mul):
        return t_mul(_hd(t.left, report), _hd(t.right, report))
    raise UnsupportedFragment("hd of a non-series term", subterm=t)


def _tl(t: Term, report) -> Term:
    if isinstance(t, (Var, Tl)):
        return Tl(t)
    if isinstance(t, (Hd, RatConst)):
        return ZERO_T
    if isinstance(t, XConst):
        return ONE_T
    if isinstance(t, StreamConst):
        if report:
            report.note("tl-const", str(t.value))
        return _const_term(streams.tl(t.value))
    if isinstance(t, Add):
        return t_add(_tl(t.left, report), _tl(t.right, report))
    if isinstance(t, Sub):
        return t_sub(_tl(t.left, report), _tl(t.right, report))
    if isinstance(t, Neg):
        return t_neg(_tl(t.arg, report))
    if isinstance(t, Mul):
        # tl(a*b) = tl(a)*b + hd(a)*tl(b)
        a, b = t.left, t.right
        return t_add(t_mul(_tl(a, report), b), t_mul(_hd(a, report), _tl(b, report)))
    raise UnsupportedFragment("tl of a non-series term", subterm=t)


def _map_terms(f: Formula, fn) -> Formula:
    if isinstance(f, Atom):
        return Atom(fn(f.lhs), f.rel, fn(f.rhs))
    if isinstance(f, Not):
        return Not(_map_terms(f.arg, fn))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_map_terms(a, fn) for a in f.args))
    if isinstance(f, (Implies,)) or type(f).__name__ == "Iff":
        return type(f)(_map_terms(f.left, fn), _map_terms(f.right, fn))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, _map_terms(f.body, fn))
    return f


def push_all(f: Formula, report: ExpansionReport | None = None) -> Formula:
    return _map_terms(f, lambda t: push_hd_tl(t, report))


# ---------------------------------------------------------------------------
# Rational constants


def _fraction(t: Term):
    """``(numerator term, denominator UniPoly)``; the denominator is positive
    at the infinitesimal because its lowest coefficient is 1."""
    if isinstance(t, StreamConst):
        return uni_to_term(t.value.num), t.value.den
    one = UniPoly([1])
    if isinstance(t, (Add, Sub)):
        a, da = _fraction(t.left)
        b, db = _fraction(t.right)
        op = t_add if isinstance(t, Add) else t_sub
        if da == db:
            return op(a, b), da
        return op(_scale(a, db), _scale(b, da)), da * db
    if isinstance(t, Mul):
        a, da = _fraction(t.left)
        b, db = _fraction(t.right)
        return t_mul(a, b), da * db
    if isinstance(t, Neg):
        a, da = _fraction(t.arg)
        return t_neg(a), da
    if isinstance(t, (Hd, Tl)):
        inner, d = _fraction(t.arg)
        if d != one:
            raise UnsupportedFragment(f"stream constant under {type(t).__name__.lower()}",
                                      subterm=t)
        return t, one
    if isinstance(t, Cons):
        return _fraction(Add(t.head, Mul(XConst(), t.tail)))
    return t, one


def _scale(t: Term, p: UniPoly) -> Term:
    return t if p == UniPoly([1]) else t_mul(uni_to_term(p), t)


def expand_constants(f: Formula, report: ExpansionReport | None = None) -> Formula:
    """Clear denominators of stream constants atom by atom.

    Each side ``n/d`` is cross-multiplied; every denominator is positive in
    the stream order, so relations keep their direction.
    """

    def atom(a: Atom) -> Formula:
        if a.rel == "DIVIDES":
            return a
        if not _has_const(a.lhs) and not _has_const(a.rhs):
            return a
        ln, ld = _fraction(a.lhs)
        rn, rd = _fraction(a.rhs)
        if report:
            report.note("const", f"cleared {ld.to_str()} and {rd.to_str()}")
        return Atom(_scale(ln, rd), a.rel, _scale(rn, ld))

    return _map_atoms_keep(f, atom)


def _has_const(t: Term) -> bool:
    if isinstance(t, StreamConst):
        return not (t.value.den == UniPoly([1]))
    for c in (getattr(t, n) for n in ("left", "right", "arg", "head", "tail") if hasattr(t, n)):
        if _has_const(c):
            return True
    return False


def _map_atoms_keep(f: Formula, fn) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(_map_atoms_keep(f.arg, fn))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_map_atoms_keep(a, fn) for a in f.args))
    if isinstance(f, Implies) or type(f).__name__ == "Iff":
        return type(f)(_map_atoms_keep(f.left, fn), _map_atoms_keep(f.right, fn))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, _map_atoms_keep(f.body, fn))
    return f


# ---------------------------------------------------------------------------
# Power-series predicate, relativization, divisibility


def sbar(t: Term) -> Formula:
    """Witness-side power-series guard ``X*t*t < 1``.

    On Laurent series this is exactly ``v(t) >= 0``.  In the real closure,
    where quantifiers actually range, it admits every ``t`` with
    ``v(t) > -1/2``.
    """
    return Atom(Mul(XConst(), Mul(t, t)), "LT", ONE_T)


def sbar_strict(t: Term) -> Formula:
    """Universal-side guard ``X^(1/2)*t*t < 1``: ``v(t) > -1/4`` in the real
    closure, again exactly ``v(t) >= 0`` on Laurent series.

    Sums and products of two such elements satisfy :func:`sbar`.
    """
    return Atom(Mul(XRoot(), Mul(t, t)), "LT", ONE_T)


def sbar_square_form(t: Term, witness: str = "w") -> Formula:
    """The square-criterion form ``exists w:L. w*w = 1 + X*t*t``."""
    return Exists(witness, Sort.L,
                  Atom(Mul(Var(witness), Var(witness)), "EQ",
                       Add(ONE_T, Mul(XConst(), Mul(t, t)))))


def relativize(f: Formula, report: ExpansionReport | None = None) -> Formula:
    """Make every quantifier range over ``L``, guarding former ``S`` ones.

    The formula is put in negation normal form first so that the guard can
    depend on the effective quantifier: universal variables get
    :func:`sbar_strict`, existential ones :func:`sbar`.
    """
    return _relativize(nnf(f), report)


def _relativize(f: Formula, report) -> Formula:
    if isinstance(f, Quantifier):
        body = _relativize(f.body, report)
        if f.sort is Sort.L:
            return type(f)(f.var, Sort.L, body)
        if report:
            report.note("relativize", f.var)
        if isinstance(f, Exists):
            return Exists(f.var, Sort.L, conj(sbar(Var(f.var)), body))
        return Forall(f.var, Sort.L, disj(Not(sbar_strict(Var(f.var))), body))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_relativize(a, report) for a in f.args))
    return f


def expand_divides(f: Formula, report: ExpansionReport | None = None) -> Formula:
    """``s divides t`` becomes ``exists h:S. t = s*h`` (ring divisibility)."""
    taken = set(all_names(f))

    def go(g: Formula, l_context: bool) -> Formula:
        if isinstance(g, Atom) and g.rel == "DIVIDES":
            h = fresh_name("h", taken)
            taken.add(h)
            if report:
                report.introduced_vars.append(h)
                report.note("divides", f"witness {h}")
                if l_context:
                    report.flags.append(f"divides under an L-sorted quantifier, witness {h} is S-sorted")
            return Exists(h, Sort.S, Atom(g.rhs, "EQ", Mul(g.lhs, Var(h))))
        if isinstance(g, Quantifier):
            return type(g)(g.var, g.sort, go(g.body, l_context or g.sort is Sort.L))
        if isinstance(g, Not):
            return Not(go(g.arg, l_context))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(a, l_context) for a in g.args))
        if isinstance(g, Implies) or type(g).__name__ == "Iff":
            return type(g)(go(g.left, l_context), go(g.right, l_context))
        return g

    return go(f, False)


# ---------------------------------------------------------------------------
# hd / tl elimination


class _Residual(Exception):
    def __init__(self, what):
        super().__init__(what)
        self.what = what


def _chain_name(v: str, k: int) -> str:
    return v if k == 0 else f"tl{k}:{v}"


def _head_name(v: str, k: int) -> str:
    return f"hd{k}:{v}"


_SPECIAL = re.compile(r"^(hd|tl)(\d+):(.+)$")


def _parse_special(name: str):
    """``('tl', v, k)``, ``('hd', v, k)`` or ``None`` for ordinary names."""
    m = _SPECIAL.match(name)
    return (m.group(1), m.group(3), int(m.group(2))) if m else None


def _term_poly(t: Term, sorts: dict) -> MultiPoly:
    if isinstance(t, Var):
        return MultiPoly.var(t.name)
    if isinstance(t, XConst):
        return MultiPoly.var("X")
    if isinstance(t, RatConst):
        return MultiPoly.const(t.value)
    if isinstance(t, StreamConst):
        if t.value.den != UniPoly([1]):
            raise _Residual(str(t))
        return MultiPoly.from_uni(t.value.num, "X")
    if isinstance(t, Add):
        return _term_poly(t.left, sorts) + _term_poly(t.right, sorts)
    if isinstance(t, Sub):
        return _term_poly(t.left, sorts) - _term_poly(t.right, sorts)
    if isinstance(t, Mul):
        return _term_poly(t.left, sorts) * _term_poly(t.right, sorts)
    if isinstance(t, Neg):
        return -_term_poly(t.arg, sorts)
    if isinstance(t, Tl):
        base = _chain_base(t)
        if base is None:
            raise _Residual(str(t))
        _check_sort(base[0], sorts, t)
        return MultiPoly.var(_chain_name(*base))
    if isinstance(t, Hd):
        base = _chain_base(t.arg)
        if base is None:
            raise _Residual(str(t))
        _check_sort(base[0], sorts, t)
        return MultiPoly.var(_head_name(*base))
    raise _Residual(str(t))


def _check_sort(v: str, sorts: dict, t: Term) -> None:
    if sorts.get(v, Sort.S) is Sort.L:
        raise UnsupportedFragment(f"hd/tl applied to L-sorted variable {v}", subterm=t)


def _specials(p: MultiPoly, kind: str) -> set:
    return {v for v in p.variables() if (s := _parse_special(v)) and s[0] == kind}


def _has_special(p: MultiPoly) -> bool:
    return any(_parse_special(v) for v in p.variables())


class _Facts:
    """Linear equations among head symbols, kept in solved form."""

    def __init__(self, rows=()):
        self.rows = list(rows)
        self._pivots = None

    def plus(self, row: MultiPoly) -> "_Facts":
        return _Facts(self.rows + [row])

    def pivots(self) -> dict:
        if self._pivots is None:
            piv: dict = {}
            for row in self.rows:
                r = _subst_all(row, piv)
                hs = sorted(_specials(r, "hd"))
                if not hs:
                    continue  # redundant or contradictory
                v = hs[-1]
                cs = r.coefficients(v)
                if len(cs) != 2 or _specials(cs[1], "hd") or not cs[1].is_constant():
                    continue
                expr = -cs[0] * (1 / cs[1].constant_value())
                piv = {k: e.substitute(v, expr) for k, e in piv.items()}
                piv[v] = expr
            self._pivots = piv
        return self._pivots

    def reduce(self, p: MultiPoly) -> MultiPoly:
        return _subst_all(p, self.pivots())


def _subst_all(p: MultiPoly, piv: dict) -> MultiPoly:
    for v, e in piv.items():
        if v in p.variables():
            p = p.substitute(v, e)
    return p


def _is_linear_in_heads(p: MultiPoly) -> bool:
    for m in p.terms:
        deg = 0
        for v, e in m:
            s = _parse_special(v)
            if s is None or s[0] != "hd":
                return False
            deg += e
        if deg > 1:
            return False
    return True


def _head_fact(p: MultiPoly, sorts: dict) -> MultiPoly | None:
    """``hd`` of the equation ``p = 0`` as a linear head relation, if any."""
    out = p
    for v in list(p.variables()):
        if sorts.get(v, Sort.S) is Sort.L:
            return None
        s = _parse_special(v)
        if v == "X":
            out = out.substitute("X", MultiPoly())
        elif s is None:
            out = out.substitute(v, MultiPoly.var(_head_name(v, 0)))
        elif s[0] == "tl":
            out = out.substitute(v, MultiPoly.var(_head_name(s[1], s[2])))
    if out.is_constant() or not _is_linear_in_heads(out):
        return None
    return out


def _eliminate_chains(p: MultiPoly, facts: _Facts) -> MultiPoly:
    """Replace ``tl^k(v)`` by ``(v - sum h_i X^i) / X^k``, clear powers of
    ``X`` by an even power and reduce heads; heads must disappear."""
    inv = "inv:X"
    q = p
    for v in sorted(_specials(p, "tl")):
        _, base, k = _parse_special(v)
        num = MultiPoly.var(base)
        for i in range(k):
            num = num - MultiPoly.var(_head_name(base, i)) * MultiPoly.var("X", i)
        q = q.substitute(v, num * MultiPoly.var(inv, k))
    top = max((dict(m).get(inv, 0) for m in q.terms), default=0)
    top += top % 2
    if top:
        out = {}
        for m, c in q.terms.items():
            d = dict(m)
            b = d.pop(inv, 0)
            shift = top - b
            if shift:
                d["X"] = d.get("X", 0) + shift
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c
        q = MultiPoly(out)
    q = facts.reduce(q)
    if _has_special(q):
        raise _Residual(" ".join(sorted(v for v in q.variables() if _parse_special(v))))
    return q


def _heads_to_stream(p: MultiPoly) -> MultiPoly:
    out = p
    for v in _specials(p, "hd"):
        _, base, k = _parse_special(v)
        out = out.substitute(v, MultiPoly.var(_chain_name(base, k)))
    return out


class _HdTlRewriter:
    def __init__(self, report: ExpansionReport):
        self.report = report

    def atom_poly(self, a: Atom, sorts) -> MultiPoly:
        return _term_poly(a.lhs, sorts) - _term_poly(a.rhs, sorts)

    def rewrite_atom(self, a: Atom, facts: _Facts, sorts) -> Formula:
        from .qe import poly_to_term

        p = self.atom_poly(a, sorts)
        if not _has_special(p):
            return a
        rel = a.rel

        def emit(poly: MultiPoly, r: str) -> Formula:
            poly = _eliminate_chains(poly, facts)
            if poly.is_constant():
                v = poly.constant_value()
                ok = v == 0 if r == "EQ" else (v < 0 if r == "LT" else v <= 0)
                return TRUE if ok else FALSE
            return Atom(poly_to_term(poly, root_scale=False), r, ZERO_T)

        pure = all((s := _parse_special(v)) and s[0] == "hd" for v in p.variables())
        if pure:
            r = facts.reduce(p)
            if r.is_constant():
                self.report.note("hd-determined", str(a))
                return emit(r, rel)
            if not _is_linear_in_heads(r):
                raise _Residual(str(a))
            g = _heads_to_stream(r)
            sq = g * g - MultiPoly.var("X")
            self.report.note("hd-linear", str(a))
            if rel == "EQ":
                return emit(sq, "LT")
            if rel == "LT":
                return conj(emit(g, "LT"), emit(-sq, "LE"))
            if rel == "LE":
                return disj(emit(g, "LT"), emit(sq, "LT"))
            raise _Residual(str(a))
        self.report.note("tl-determined", str(a))
        return emit(p, rel)

    def fact_of(self, a: Atom, sorts) -> MultiPoly | None:
        if a.rel != "EQ":
            return None
        try:
            p = self.atom_poly(a, sorts)
        except _Residual:
            return None
        if all((s := _parse_special(v)) and s[0] == "hd" for v in p.variables()):
            return p if _is_linear_in_heads(p) and not p.is_constant() else None
        return _head_fact(p, sorts)

    def rw(self, f: Formula, facts: _Facts, sorts: dict) -> Formula:
        if isinstance(f, Atom):
            return self.rewrite_atom(f, facts, sorts)
        if isinstance(f, Not):
            return neg(self.rw(f.arg, facts, sorts))
        if isinstance(f, Quantifier):
            s2 = dict(sorts)
            s2[f.var] = f.sort
            return type(f)(f.var, f.sort, self.rw(f.body, facts, s2))
        if isinstance(f, (And, Or)):
            return self.rw_junction(f, facts, sorts)
        return f

    def rw_junction(self, f, facts: _Facts, sorts) -> Formula:
        is_and = isinstance(f, And)
        args = list(f.args)

        def fact_atom(g):
            if is_and and isinstance(g, Atom) and g.rel == "EQ":
                return g
            if not is_and and isinstance(g, Not) and isinstance(g.arg, Atom) and g.arg.rel == "EQ":
                return g.arg
            return None

        done: dict = {}
        pending = [i for i, g in enumerate(args) if fact_atom(g) is not None]
        progress = True
        while progress and pending:
            progress = False
            for i in list(pending):
                try:
                    done[i] = self.rw(args[i], facts, sorts)
                except _Residual:
                    continue
                pending.remove(i)
                progress = True
                row = self.fact_of(fact_atom(args[i]), sorts)
                if row is not None:
                    facts = facts.plus(row)
        parts = [done[i] if i in done else self.rw(g, facts, sorts) for i, g in enumerate(args)]
        return conj(*parts) if is_and else disj(*parts)


def eliminate_hd_tl(f: Formula, report: ExpansionReport | None = None):
    """Remove ``hd``, ``tl`` and ``cons``; returns ``(formula, report)``.

    Heads must be fixed by linear head equations available in the
    surrounding conjunctive context (or by negated siblings of a
    disjunction).  Anything else is reported and raises
    ``UnsupportedFragment``.
    """
    report = report or ExpansionReport()
    g = nnf(push_all(f, report))
    try:
        out = _HdTlRewriter(report).rw(g, _Facts(), {})
    except _Residual as exc:
        report.residual_ops.append(exc.what)
        raise UnsupportedFragment(f"cannot eliminate hd/tl in {exc.what}",
                                  subterm=exc.what, report=report) from None
    return out, report


def bisim_formula(b: Formula, x: str = "x", y: str = "y") -> Formula:
    """``forall x, y. B(x, y) -> hd(x) = hd(y) /\\ B(tl x, tl y)``."""
    step = substitute(substitute(b, x, Tl(Var("__x"))), y, Tl(Var("__y")))
    step = substitute(substitute(step, "__x", Var(x)), "__y", Var(y))
    body = Implies(b, And((Atom(Hd(Var(x)), "EQ", Hd(Var(y))), step)))
    return Forall(x, Sort.S, Forall(y, Sort.S, body))


def expand_all(f: Formula):
    """The full expansion pipeline; returns ``(formula, report)``."""
    report = ExpansionReport()
    g = push_all(f, report)
    g = expand_constants(g, report)
    g, report = eliminate_hd_tl(g, report)
    g = expand_divides(g, report)
    g = push_all(g, report)
    g = expand_constants(g, report)
    g = relativize(g, report)
    return g, report
