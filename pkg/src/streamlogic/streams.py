"""Stream kernel: closed-form rational streams and truncated series.

A stream is a formal power series; streams with a finite history are
formal Laurent series.  Two carriers are used:

* :class:`LaurentRational` -- an exact quotient ``num/den`` of polynomials
  in ``X``.  Covers every rational stream and is closed under the field
  operations.
* :class:`TruncSeries` -- a finite window of coefficients, for streams
  without a rational closed form (square roots, Catalan numbers).

The order is the one induced by the positive cone of series whose lowest
nonzero coefficient is positive; ``X`` is positive and infinitesimal.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union

from .algebra import Sign, UniPoly, as_rational, uni_gcd
from .errors import (DivByZero, InsufficientOrder, IrrationalHead, NoRealRoot,
                     NotAPowerSeries, ParseError)

INFINITY = math.inf


class Order(Enum):
    LT = -1
    EQ = 0
    GT = 1


class LaurentRational:
    """Canonical quotient ``num/den`` denoting an element of R((X)).

    Canonical form: ``gcd(num, den) = 1`` and the lowest-order nonzero
    coefficient of ``den`` is 1, so ``den`` is positive in the stream order.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _to_uni(num)
        den = UniPoly((1,)) if den is None else _to_uni(den)
        if den.is_zero():
            raise DivByZero("zero denominator")
        if num.is_zero():
            self.num, self.den = UniPoly(), UniPoly((1,))
            return
        g = uni_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
        scale = 1 / den.low()
        self.num = num * scale
        self.den = den * scale

    # -- construction ---------------------------------------------------
    @classmethod
    def const(cls, c) -> "LaurentRational":
        return cls(UniPoly((as_rational(c),)))

    @classmethod
    def X(cls, power: int = 1) -> "LaurentRational":
        if power >= 0:
            return cls(UniPoly.monomial(power))
        return cls(UniPoly((1,)), UniPoly.monomial(-power))

    # -- protocol -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentRational.const(other)
        if isinstance(other, LaurentRational):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"LaurentRational({self})"

    def __str__(self):
        n = self.num.to_str()
        if self.den == UniPoly((1,)):
            return n
        d = self.den.to_str()
        if _is_compound(self.num):
            n = f"({n})"
        if _is_compound(self.den):
            d = f"({d})"
        return f"{n}/{d}"

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # -- field operations ----------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        return LaurentRational(self.num * other.den + other.num * self.den,
                               self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return LaurentRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return LaurentRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other.is_zero():
            raise DivByZero("division by the zero stream")
        return LaurentRational(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return LaurentRational.const(1) / (self ** -k)
        return LaurentRational(self.num ** k, self.den ** k)

    # -- order ------------------------------------------------------------
    def sign(self) -> Sign:
        # den.low() == 1 > 0, so the lead coefficient's sign is num's
        return Sign.of(self.num.low())

    def __lt__(self, other):
        return compare(self, _lift(other)) is Order.LT

    def __le__(self, other):
        return compare(self, _lift(other)) is not Order.GT

    def __gt__(self, other):
        return compare(self, _lift(other)) is Order.GT

    def __ge__(self, other):
        return compare(self, _lift(other)) is not Order.LT


def _to_uni(p) -> UniPoly:
    if isinstance(p, UniPoly):
        return p
    if isinstance(p, (int, Fraction)):
        return UniPoly((p,))
    return UniPoly(p)


def _lift(x) -> LaurentRational:
    if isinstance(x, LaurentRational):
        return x
    return LaurentRational.const(x)


def _is_compound(p: UniPoly) -> bool:
    return sum(1 for c in p.coeffs if c) > 1 or (p.lowdeg > 0 and p.low() != 1)


ZERO = LaurentRational.const(0)
ONE = LaurentRational.const(1)


def lr_arith(f: LaurentRational, g: LaurentRational, op: str) -> LaurentRational:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown operation {op!r}")


def valuation(f: LaurentRational):
    """Index of the lowest nonzero coefficient, or ``INFINITY`` for zero."""
    if f.is_zero():
        return INFINITY
    return f.num.lowdeg - f.den.lowdeg


def abs_val(f: LaurentRational) -> Fraction:
    """Non-Archimedean absolute value ``2**(-v(f))``; 0 for the zero stream."""
    v = valuation(f)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(2) ** (-v)


def metric_d(f: LaurentRational, g: LaurentRational) -> Fraction:
    return abs_val(f - g)


def compare(f: LaurentRational, g: LaurentRational) -> Order:
    return Order(int((g - f).sign()) * -1)


def lead_coefficient(f: LaurentRational) -> Fraction:
    """Coefficient at the valuation index (0 for the zero stream)."""
    if f.is_zero():
        return Fraction(0)
    return f.num.low() / f.den.low()


# -- coefficient extraction -----------------------------------------------


@dataclass(frozen=True)
class TruncSeries:
    """Coefficients ``coeffs[i]`` of ``X**(start+i)``, known modulo
    ``X**(start+order)``."""

    start: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))
        if not self.coeffs:
            raise InsufficientOrder("a truncated series needs at least one coefficient")

    @classmethod
    def of(cls, coeffs: Iterable, start: int = 0) -> "TruncSeries":
        return cls(start, tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def end(self) -> int:
        return self.start + self.order

    def __getitem__(self, index: int) -> Fraction:
        """Coefficient of ``X**index`` (0 below ``start``)."""
        if index >= self.end:
            raise InsufficientOrder(f"coefficient {index} is not known")
        if index < self.start:
            return Fraction(0)
        return self.coeffs[index - self.start]

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if self.end != other.end:
            return False
        lo = min(self.start, other.start)
        return all(self[i] == other[i] for i in range(lo, self.end))

    def __hash__(self):
        lo = next((self.start + i for i, c in enumerate(self.coeffs) if c), self.end)
        return hash((self.end, tuple(self[i] for i in range(lo, self.end))))

    def __str__(self):
        body = ", ".join(str(c) for c in self.coeffs)
        return f"({body}, ...) @ start={self.start}"

    def tokens(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __add__(self, other):
        return ts_arith(self, other, "add")

    def __mul__(self, other):
        return ts_arith(self, other, "mul")

    def __truediv__(self, other):
        return ts_arith(self, other, "div")

    def __neg__(self):
        return TruncSeries(self.start, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return ts_arith(self, -other, "add")


def _series_div(num: list, den: list, n: int) -> list:
    """First ``n`` coefficients of num/den for den[0] != 0."""
    d0 = den[0]
    out = []
    for k in range(n):
        acc = num[k] if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / d0)
    return out


def coeffs(f: LaurentRational, n: int) -> TruncSeries:
    """First ``n`` coefficients starting at index ``min(v(f), 0)``.

    Power series are listed from index 0 (so leading zeros show up);
    series with a finite history start at their valuation.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if f.is_zero():
        return TruncSeries(0, (0,) * n)
    a, b = f.num.lowdeg, f.den.lowdeg
    v = a - b
    start = min(v, 0)
    num = [Fraction(0)] * (v - start) + list(f.num.coeffs[a:])
    den = list(f.den.coeffs[b:])
    return TruncSeries(start, tuple(_series_div(num, den, n)))


def to_trunc(f: LaurentRational, end: int) -> TruncSeries:
    """Series window covering indices from ``min(v(f), 0)`` up to ``end``."""
    v = valuation(f)
    start = 0 if v == INFINITY else min(v, 0)
    return coeffs(f, max(end - start, 1))


def ts_arith(a: TruncSeries, b: TruncSeries, op: str) -> TruncSeries:
    if op == "add":
        start = min(a.start, b.start)
        end = min(a.end, b.end)
        return TruncSeries(start, tuple(a[i] + b[i] for i in range(start, end)))
    if op == "mul":
        order = min(a.order, b.order)
        out = []
        for k in range(order):
            out.append(sum((a.coeffs[i] * b.coeffs[k - i] for i in range(k + 1)),
                           Fraction(0)))
        return TruncSeries(a.start + b.start, tuple(out))
    if op == "div":
        if b.coeffs[0] == 0:
            raise InsufficientOrder(
                "divisor has a zero coefficient at its start index; "
                "its valuation is not known from the window")
        order = min(a.order, b.order)
        return TruncSeries(a.start - b.start,
                           tuple(_series_div(list(a.coeffs), list(b.coeffs), order)))
    raise ValueError(f"unknown operation {op!r}")


def rational_sqrt(q: Fraction) -> Fraction:
    if q < 0:
        raise NoRealRoot(f"{q} is negative")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise IrrationalHead(f"{q} is not the square of a rational")
    return Fraction(rn, rd)


def sqrt_prefix(f: TruncSeries, n: int) -> TruncSeries:
    """Positive square root of a power series, to ``n`` coefficients.

    Coefficients follow from equating coefficients in ``g*g = f``:
    ``g_k = (f_k - sum_{0<i<k} g_i g_{k-i}) / (2 g_0)``.
    """
    if f.start > 0:
        raise NoRealRoot("series has zero head")
    if f.start < 0:
        if any(f[i] for i in range(f.start, 0)):
            raise NotAPowerSeries("series has negative-index terms")
        f = TruncSeries(0, f.coeffs[-f.start:]) if f.end > 0 else f
    f0 = f.coeffs[0]
    if f0 <= 0:
        raise NoRealRoot(f"head {f0} is not positive")
    if f.order < n:
        raise InsufficientOrder(f"need {n} coefficients, have {f.order}")
    g0 = rational_sqrt(f0)
    g = [g0]
    for k in range(1, n):
        acc = f.coeffs[k] - sum((g[i] * g[k - i] for i in range(1, k)), Fraction(0))
        g.append(acc / (2 * g0))
    return TruncSeries(0, tuple(g))


def catalan_check(n: int) -> TruncSeries:
    """First ``n`` Catalan numbers as ``2/(1 + sqrt(1 - 4X))``."""
    if n < 1:
        raise ValueError("n must be positive")
    one_minus_4x = TruncSeries(0, (1, -4) + (0,) * (n - 2) if n > 1 else (1,))
    root = sqrt_prefix(one_minus_4x, n)
    one = TruncSeries(0, (1,) + (0,) * (n - 1))
    two = TruncSeries(0, (2,) + (0,) * (n - 1))
    return two / (one + root)


# -- head / tail ------------------------------------------------------------


def hd(f: LaurentRational) -> Fraction:
    v = valuation(f)
    if v < 0:
        raise NotAPowerSeries(f"{f} has negative valuation {v}")
    if v > 0:
        return Fraction(0)
    return f.num[0] / f.den[0]


def tl(f: LaurentRational) -> LaurentRational:
    h = hd(f)
    return (f - h) / LaurentRational.X()


def cons(r, f: LaurentRational) -> LaurentRational:
    return LaurentRational.const(r) + LaurentRational.X() * f


# -- textual stream expressions -----------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")

Stream = Union[LaurentRational, TruncSeries]


def _tokenize(text: str):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, sym = m.groups()
        col = m.start(m.lastindex) + 1
        if num is not None:
            tokens.append(("num", int(num), col))
        elif name is not None:
            tokens.append(("name", name, col))
        elif sym.strip():
            tokens.append(("sym", sym, col))
        pos = m.end()
    tokens.append(("end", None, len(text) + 1))
    return tokens


class _ExprParser:
    """Recursive-descent parser producing a small expression tree."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, sym):
        tok = self.take()
        if tok[0] != "sym" or tok[1] != sym:
            raise ParseError(f"expected {sym!r}", 1, tok[2])

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", 1, tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "sym" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "sym" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "sym" and self.peek()[1] == "-":
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[0] == "sym" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("exponent must be a natural number", 1, tok[2])
            node = ("pow", node, tok[1])
        return node

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return ("const", Fraction(val))
        if kind == "name":
            if val == "X":
                return ("X",)
            if val == "catalan":
                return ("catalan",)
            if val == "sqrt":
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return ("sqrt", inner)
            raise ParseError(f"unknown identifier {val!r}", 1, col)
        if kind == "sym" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {val!r}", 1, col)


def _uses_series(node) -> bool:
    if node[0] in ("sqrt", "catalan"):
        return True
    return any(isinstance(c, tuple) and _uses_series(c) for c in node[1:])


def _eval_exact(node) -> LaurentRational:
    kind = node[0]
    if kind == "const":
        return LaurentRational.const(node[1])
    if kind == "X":
        return LaurentRational.X()
    if kind == "neg":
        return -_eval_exact(node[1])
    if kind == "pow":
        return _eval_exact(node[1]) ** node[2]
    a, b = _eval_exact(node[1]), _eval_exact(node[2])
    return {"+": a.__add__, "-": a.__sub__, "*": a.__mul__, "/": a.__truediv__}[kind](b)


def _eval_series(node, end: int) -> TruncSeries:
    """Evaluate with enough working precision to know indices < ``end``."""
    kind = node[0]
    if not _uses_series(node):
        return to_trunc(_eval_exact(node), end)
    if kind == "catalan":
        return catalan_check(max(end, 1))
    if kind == "sqrt":
        inner = _eval_series(node[1], end)
        return sqrt_prefix(inner, min(inner.order, max(end, 1)))
    if kind == "neg":
        return -_eval_series(node[1], end)
    if kind == "pow":
        base = _eval_series(node[1], end)
        out = TruncSeries(0, (1,) + (0,) * (base.order - 1))
        for _ in range(node[2]):
            out = out * base
        return out
    a, b = _eval_series(node[1], end), _eval_series(node[2], end)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    return _strip(a) / _strip(b)


def _strip(s: TruncSeries) -> TruncSeries:
    i = 0
    while i < s.order - 1 and s.coeffs[i] == 0:
        i += 1
    return TruncSeries(s.start + i, s.coeffs[i:])


def parse_stream(text: str) -> LaurentRational:
    """Parse a closed-form stream expression over X and rationals."""
    node = _ExprParser(text).parse()
    if _uses_series(node):
        raise ParseError("sqrt/catalan have no closed form here", 1, 1)
    return _eval_exact(node)


def eval_stream(text: str, count: int) -> TruncSeries:
    """First ``count`` coefficients of a stream expression.

    Closed forms start at their valuation index; expressions using
    ``sqrt``/``catalan`` are evaluated on truncated series.
    """
    node = _ExprParser(text).parse()
    if not _uses_series(node):
        return coeffs(_eval_exact(node), count)
    s = _strip(_eval_series(node, count))
    if s.order < count:
        s = _strip(_eval_series(node, 2 * count + 2))
    if s.order < count:
        raise InsufficientOrder(f"only {s.order} coefficients are determined")
    return TruncSeries(s.start, s.coeffs[:count])
