"""Abstract syntax, parser and printer for first-order stream formulas.

The language is that of ordered rings with the extra constant ``X``,
rational-stream constants ``[[p/q]]``, the stream operators ``hd``, ``tl``
and ``cons``, and the ``divides`` relation.  Quantified variables carry a
sort: ``S`` (power series, the default) or ``L`` (Laurent series).

Grammar (one formula per file, ``#`` starts a comment)::

    formula := ("forall" | "exists") ident (":" ("S"|"L"))? "." formula
             | formula ("<->" | "->" | "\\/" | "/\\") formula | "~" formula
             | term rel term | "true" | "false" | "(" formula ")"
    rel     := "=" | "!=" | "<=" | "<" | ">=" | ">" | "divides"
    term    := rational | "X" | "[[" stream "]]" | ident | "hd(" term ")"
             | "tl(" term ")" | "cons(" term "," term ")"
             | term ("+"|"-"|"*") term | "-" term | term "^" nat | "X^(1/2)" | "(" term ")"
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import ParseError, UnknownIdentifier
from .streams import LaurentRational, parse_stream


class Sort(Enum):
    S = "S"
    L = "L"


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class RatConst(Term):
    value: Fraction


@dataclass(frozen=True)
class XConst(Term):
    pass


@dataclass(frozen=True)
class XRoot(Term):
    """The positive square root of ``X``; written ``X^(1/2)``."""


@dataclass(frozen=True)
class StreamConst(Term):
    value: LaurentRational


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Sub(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Neg(Term):
    arg: Term


@dataclass(frozen=True)
class Hd(Term):
    arg: Term


@dataclass(frozen=True)
class Tl(Term):
    arg: Term


@dataclass(frozen=True)
class Cons(Term):
    head: Term
    tail: Term


def const(value) -> RatConst:
    return RatConst(Fraction(value))


def term_children(t: Term) -> tuple:
    if isinstance(t, (Add, Sub, Mul)):
        return (t.left, t.right)
    if isinstance(t, (Neg, Hd, Tl)):
        return (t.arg,)
    if isinstance(t, Cons):
        return (t.head, t.tail)
    return ()


def rebuild_term(t: Term, children) -> Term:
    if isinstance(t, (Add, Sub, Mul)):
        return type(t)(*children)
    if isinstance(t, (Neg, Hd, Tl)):
        return type(t)(children[0])
    if isinstance(t, Cons):
        return Cons(*children)
    return t


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for c in term_children(t):
        out |= term_vars(c)
    return out


def term_nodes(t: Term):
    yield t
    for c in term_children(t):
        yield from term_nodes(c)


def subst_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    kids = term_children(t)
    if not kids:
        return t
    return rebuild_term(t, [subst_term(c, mapping) for c in kids])


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()

RELATIONS = ("EQ", "LE", "LT", "GE", "GT", "NEQ", "DIVIDES")


@dataclass(frozen=True)
class Atom(Formula):
    lhs: Term
    rel: str
    rhs: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sort: Sort
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sort: Sort
    body: Formula


Quantifier = (Forall, Exists)


def conj(*args: Formula) -> Formula:
    flat = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        elif isinstance(a, Bottom):
            return FALSE
        elif not isinstance(a, Top):
            flat.append(a)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: Formula) -> Formula:
    flat = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        elif isinstance(a, Top):
            return TRUE
        elif not isinstance(a, Bottom):
            flat.append(a)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def neg(f: Formula) -> Formula:
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, Quantifier):
        return (f.body,)
    return ()


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` replacing every atom ``a`` with ``fn(a)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return neg(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return conj(*(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return disj(*(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, Iff):
        return Iff(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, map_atoms(f.body, fn))
    return f


def atoms(f: Formula):
    if isinstance(f, Atom):
        yield f
    for c in children(f):
        yield from atoms(c)


def formula_terms(f: Formula):
    for a in atoms(f):
        yield a.lhs
        yield a.rhs


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return term_vars(f.lhs) | term_vars(f.rhs)
    if isinstance(f, Quantifier):
        return free_vars(f.body) - {f.var}
    out: set[str] = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def all_names(f: Formula) -> set[str]:
    out = set()
    for t in formula_terms(f):
        out |= term_vars(t)
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Quantifier):
            out.add(g.var)
        stack.extend(children(g))
    return out


def fresh_name(base: str, taken) -> str:
    base = re.sub(r"_\d+$", "", base) or "v"
    for i in itertools.count(1):
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand
    raise AssertionError


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Capture-avoiding substitution of ``t`` for free ``var`` in ``f``."""
    tv = term_vars(t)

    def go(g: Formula, taken: set) -> Formula:
        if isinstance(g, Atom):
            m = {var: t}
            return Atom(subst_term(g.lhs, m), g.rel, subst_term(g.rhs, m))
        if isinstance(g, Quantifier):
            if g.var == var:
                return g
            if g.var in tv:
                new = fresh_name(g.var, taken | tv | all_names(g.body))
                body = rename_free(g.body, g.var, new)
                return type(g)(new, g.sort, go(body, taken | {new}))
            return type(g)(g.var, g.sort, go(g.body, taken | {g.var}))
        if isinstance(g, Not):
            return Not(go(g.arg, taken))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(a, taken) for a in g.args))
        if isinstance(g, (Implies, Iff)):
            return type(g)(go(g.left, taken), go(g.right, taken))
        return g

    return go(f, {var} | tv)


def rename_free(f: Formula, old: str, new: str) -> Formula:
    return substitute(f, old, Var(new)) if old != new else f


def alpha_rename(f: Formula, avoid=()) -> Formula:
    """Rename bound variables so every quantifier binds a distinct name
    that also differs from every free variable."""
    taken = set(free_vars(f)) | set(avoid)

    def go(g: Formula, env: dict) -> Formula:
        if isinstance(g, Atom):
            return Atom(subst_term(g.lhs, env), g.rel, subst_term(g.rhs, env))
        if isinstance(g, Quantifier):
            name = g.var
            if name in taken:
                name = fresh_name(name, taken)
            taken.add(name)
            env2 = dict(env)
            env2[g.var] = Var(name)
            return type(g)(name, g.sort, go(g.body, env2))
        if isinstance(g, Not):
            return Not(go(g.arg, env))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(a, env) for a in g.args))
        if isinstance(g, (Implies, Iff)):
            return type(g)(go(g.left, env), go(g.right, env))
        return g

    return go(f, {})


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    """Structural equality up to renaming of bound variables."""
    def go(a, b, env_a: dict, env_b: dict, depth: int) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Atom):
            return (a.rel == b.rel
                    and _term_alpha_eq(a.lhs, b.lhs, env_a, env_b)
                    and _term_alpha_eq(a.rhs, b.rhs, env_a, env_b))
        if isinstance(a, Quantifier):
            if a.sort != b.sort:
                return False
            ea = dict(env_a)
            eb = dict(env_b)
            ea[a.var] = depth
            eb[b.var] = depth
            return go(a.body, b.body, ea, eb, depth + 1)
        ca, cb = children(a), children(b)
        return len(ca) == len(cb) and all(
            go(x, y, env_a, env_b, depth) for x, y in zip(ca, cb))

    return go(f, g, {}, {}, 0)


def _term_alpha_eq(s: Term, t: Term, env_a: dict, env_b: dict) -> bool:
    if isinstance(s, Var) and isinstance(t, Var):
        ia, ib = env_a.get(s.name), env_b.get(t.name)
        if ia is None and ib is None:
            return s.name == t.name
        return ia == ib
    if type(s) is not type(t):
        return False
    cs, ct = term_children(s), term_children(t)
    if not cs:
        return s == t
    return all(_term_alpha_eq(a, b, env_a, env_b) for a, b in zip(cs, ct))


# ---------------------------------------------------------------------------
# Normal forms


def desugar(f: Formula) -> Formula:
    """Remove ``Implies`` and ``Iff`` (bound names stay unique)."""
    if isinstance(f, Implies):
        return disj(neg(desugar(f.left)), desugar(f.right))
    if isinstance(f, Iff):
        a, b = desugar(f.left), desugar(f.right)
        a2 = alpha_rename(a, all_names(a) | all_names(b))
        b2 = alpha_rename(b, all_names(a) | all_names(b) | all_names(a2))
        return conj(disj(neg(a), b), disj(neg(b2), a2))
    if isinstance(f, Not):
        return neg(desugar(f.arg))
    if isinstance(f, And):
        return conj(*(desugar(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(desugar(a) for a in f.args))
    if isinstance(f, Quantifier):
        return type(f)(f.var, f.sort, desugar(f.body))
    return f


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form; negations remain only directly on atoms."""
    if isinstance(f, (Implies, Iff)):
        return nnf(desugar(f), positive)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, Top):
        return TRUE if positive else FALSE
    if isinstance(f, Bottom):
        return FALSE if positive else TRUE
    if isinstance(f, Atom):
        return f if positive else Not(f)
    if isinstance(f, And):
        parts = [nnf(a, positive) for a in f.args]
        return conj(*parts) if positive else disj(*parts)
    if isinstance(f, Or):
        parts = [nnf(a, positive) for a in f.args]
        return disj(*parts) if positive else conj(*parts)
    if isinstance(f, Forall):
        q = Forall if positive else Exists
        return q(f.var, f.sort, nnf(f.body, positive))
    if isinstance(f, Exists):
        q = Exists if positive else Forall
        return q(f.var, f.sort, nnf(f.body, positive))
    raise TypeError(f)


def prenex(f: Formula) -> Formula:
    """Equivalent prenex normal form with an NNF matrix."""
    g = alpha_rename(nnf(desugar(f)))

    def pull(h: Formula):
        if isinstance(h, Quantifier):
            prefix, matrix = pull(h.body)
            return [(type(h), h.var, h.sort)] + prefix, matrix
        if isinstance(h, (And, Or)):
            prefix, parts = [], []
            for a in h.args:
                p, m = pull(a)
                prefix += p
                parts.append(m)
            return prefix, (conj if isinstance(h, And) else disj)(*parts)
        return [], h

    prefix, matrix = pull(g)
    for q, v, s in reversed(prefix):
        matrix = q(v, s, matrix)
    return matrix


def is_prenex(f: Formula) -> bool:
    while isinstance(f, Quantifier):
        f = f.body
    return not any(isinstance(g, Quantifier) for g in _subformulas(f))


def _subformulas(f: Formula):
    yield f
    for c in children(f):
        yield from _subformulas(c)


def quantifier_count(f: Formula) -> int:
    return sum(1 for g in _subformulas(f) if isinstance(g, Quantifier))


# ---------------------------------------------------------------------------
# Parsing

_LEX = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<stream>\[\[)
  | (?P<num>\d+(?:\s*/\s*\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<op><->|->|/\\|\\/|!=|<=|>=|[~().:,=<>+\-*^])
""", re.VERBOSE)

KEYWORDS = {"forall", "exists", "divides", "hd", "tl", "cons", "true", "false", "X"}


@dataclass
class _Tok:
    kind: str
    value: object
    line: int
    col: int


def _show(t: _Tok) -> str:
    if t.value is None:
        return "end of input"
    return repr(str(t.value) if isinstance(t.value, Fraction) else t.value)


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _LEX.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "stream":
            end = text.find("]]", m.end())
            if end < 0:
                raise ParseError("unterminated '[['", line, col)
            inner = text[m.end():end]
            try:
                value = parse_stream(inner)
            except ParseError as exc:
                raise ParseError(f"bad stream constant: {exc}", line, col) from None
            toks.append(_Tok("stream", value, line, col))
            pos = end + 2
            continue
        elif kind == "num":
            raw = m.group().replace(" ", "")
            if "/" in raw:
                n, d = raw.split("/")
                if int(d) == 0:
                    raise ParseError("zero denominator", line, col)
                toks.append(_Tok("num", Fraction(int(n), int(d)), line, col))
            else:
                toks.append(_Tok("num", Fraction(int(raw)), line, col))
        elif kind == "name":
            name = m.group()
            toks.append(_Tok("kw" if name in KEYWORDS else "name", name, line, col))
        elif kind == "op":
            toks.append(_Tok("op", m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("end", None, line, pos - line_start + 1))
    return toks


_REL = {"=": "EQ", "!=": "NEQ", "<=": "LE", "<": "LT", ">=": "GE", ">": "GT",
        "divides": "DIVIDES"}


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, *values) -> bool:
        t = self.peek()
        return t.kind in ("op", "kw") and t.value in values

    def expect(self, value):
        t = self.take()
        if t.value != value or t.kind not in ("op", "kw"):
            raise ParseError(f"expected {value!r}, found {t.value!r}", t.line, t.col)
        return t

    def error(self, msg):
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    # formula layers: <-> < -> < \/ < /\ < ~
    def formula(self) -> Formula:
        if self.at("forall", "exists"):
            return self.quant()
        left = self.implication()
        if self.at("<->"):
            self.take()
            return Iff(left, self.formula())
        return left

    def quant(self) -> Formula:
        kind = self.take().value
        t = self.take()
        if t.kind != "name":
            raise ParseError("expected a variable name", t.line, t.col)
        sort = Sort.S
        if self.at(":"):
            self.take()
            s = self.take()
            if s.value not in ("S", "L"):
                raise ParseError("sort must be S or L", s.line, s.col)
            sort = Sort(s.value)
        self.expect(".")
        body = self.formula()
        return (Forall if kind == "forall" else Exists)(t.value, sort, body)

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.take()
            right = self.quant() if self.at("forall", "exists") else self.implication()
            return Implies(left, right)
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.at("\\/"):
            self.take()
            parts.append(self.quant() if self.at("forall", "exists") else self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.negation()]
        while self.at("/\\"):
            self.take()
            parts.append(self.quant() if self.at("forall", "exists") else self.negation())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def negation(self) -> Formula:
        if self.at("~"):
            self.take()
            if self.at("forall", "exists"):
                return Not(self.quant())
            return Not(self.negation())
        return self.primary()

    def primary(self) -> Formula:
        if self.at("true"):
            self.take()
            return TRUE
        if self.at("false"):
            self.take()
            return FALSE
        if self.at("("):
            # parenthesised formula or the start of a parenthesised term
            save = self.i
            try:
                self.take()
                f = self.formula()
                self.expect(")")
                if not self._at_relation() and not self._at_term_op():
                    return f
            except ParseError:
                pass
            self.i = save
        return self.atom()

    def _at_relation(self) -> bool:
        return self.at(*_REL)

    def _at_term_op(self) -> bool:
        return self.at("+", "-", "*", "^")

    def atom(self) -> Formula:
        lhs = self.term()
        t = self.peek()
        if not self._at_relation():
            raise ParseError(f"expected a relation, found {t.value!r}", t.line, t.col)
        rel = _REL[self.take().value]
        rhs = self.term()
        if rel == "NEQ":
            return Not(Atom(lhs, "EQ", rhs))
        if rel == "GE":
            return Atom(rhs, "LE", lhs)
        if rel == "GT":
            return Atom(rhs, "LT", lhs)
        return Atom(lhs, rel, rhs)

    def term(self) -> Term:
        node = self.product()
        while self.at("+", "-"):
            op = self.take().value
            rhs = self.product()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def product(self) -> Term:
        node = self.unary()
        while self.at("*"):
            self.take()
            node = Mul(node, self.unary())
        return node

    def unary(self) -> Term:
        if self.at("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Term:
        base = self.base()
        if self.at("^"):
            self.take()
            if isinstance(base, XConst) and self.at("("):
                self.take()
                t = self.take()
                if t.kind != "num" or t.value != Fraction(1, 2):
                    raise ParseError("only X^(1/2) is allowed", t.line, t.col)
                self.expect(")")
                return XRoot()
            t = self.take()
            if t.kind != "num" or t.value.denominator != 1 or t.value < 1:
                raise ParseError("exponent must be a positive integer", t.line, t.col)
            node = base
            for _ in range(int(t.value) - 1):
                node = Mul(node, base)
            return node
        return base

    def base(self) -> Term:
        t = self.take()
        if t.kind == "num":
            return RatConst(t.value)
        if t.kind == "stream":
            return StreamConst(t.value)
        if t.kind == "kw" and t.value == "X":
            return XConst()
        if t.kind == "kw" and t.value in ("hd", "tl"):
            self.expect("(")
            arg = self.term()
            self.expect(")")
            return Hd(arg) if t.value == "hd" else Tl(arg)
        if t.kind == "kw" and t.value == "cons":
            self.expect("(")
            h = self.term()
            self.expect(",")
            tail = self.term()
            self.expect(")")
            return Cons(h, tail)
        if t.kind == "name":
            if self.at("("):
                raise UnknownIdentifier(f"unknown function {t.value!r}", t.line, t.col)
            return Var(t.value)
        if t.kind == "op" and t.value == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {_show(t)}", t.line, t.col)


def parse(text: str) -> Formula:
    """Parse one formula; bound variables are renamed apart."""
    p = _Parser(text)
    if p.peek().kind == "end":
        raise p.error("empty input")
    f = p.formula()
    if p.peek().kind != "end":
        raise p.error(f"unexpected {_show(p.peek())}")
    return alpha_rename(f)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek().kind != "end":
        raise p.error(f"unexpected {_show(p.peek())}")
    return t


# ---------------------------------------------------------------------------
# Printing

_REL_TEXT = {"EQ": "=", "LE": "<=", "LT": "<", "GE": ">=", "GT": ">", "NEQ": "!=",
             "DIVIDES": "divides"}


def term_text(t: Term, prec: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, XConst):
        return "X"
    if isinstance(t, XRoot):
        return "X^(1/2)"
    if isinstance(t, RatConst):
        s = str(t.value)
        if t.value < 0 and prec > 1:
            return f"({s})"
        if t.value.denominator != 1 and prec > 2:
            return f"({s})"
        return s
    if isinstance(t, StreamConst):
        return f"[[{t.value}]]"
    if isinstance(t, Hd):
        return f"hd({term_text(t.arg)})"
    if isinstance(t, Tl):
        return f"tl({term_text(t.arg)})"
    if isinstance(t, Cons):
        return f"cons({term_text(t.head)}, {term_text(t.tail)})"
    if isinstance(t, Neg):
        s = "-" + term_text(t.arg, 3)
        return f"({s})" if prec > 1 else s
    if isinstance(t, (Add, Sub)):
        op = " + " if isinstance(t, Add) else " - "
        s = term_text(t.left, 1) + op + term_text(t.right, 2)
        return f"({s})" if prec > 1 else s
    if isinstance(t, Mul):
        s = term_text(t.left, 2) + "*" + term_text(t.right, 3)
        return f"({s})" if prec > 2 else s
    raise TypeError(t)


def to_text(f: Formula, prec: int = 0) -> str:
    """Render ``f`` in the concrete syntax accepted by :func:`parse`."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f"{term_text(f.lhs)} {_REL_TEXT[f.rel]} {term_text(f.rhs)}"
    if isinstance(f, Not):
        if hasattr(f.arg, "to_atom"):
            return to_text(Not(f.arg.to_atom()), prec)
        if isinstance(f.arg, Atom) and f.arg.rel == "EQ":
            return f"{term_text(f.arg.lhs)} != {term_text(f.arg.rhs)}"
        return "~" + to_text(f.arg, 5)
    if isinstance(f, Quantifier):
        kw = "forall" if isinstance(f, Forall) else "exists"
        s = f"{kw} {f.var}:{f.sort.value}. {to_text(f.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, Iff):
        s = f"{to_text(f.left, 2)} <-> {to_text(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, Implies):
        s = f"{to_text(f.left, 3)} -> {to_text(f.right, 2)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, Or):
        s = " \\/ ".join(to_text(a, 4) for a in f.args)
        return f"({s})" if prec > 3 else s
    if isinstance(f, And):
        s = " /\\ ".join(to_text(a, 5) for a in f.args)
        return f"({s})" if prec > 4 else s
    if hasattr(f, "to_atom"):
        return to_text(f.to_atom(), prec)
    raise TypeError(f)


print_formula = to_text
