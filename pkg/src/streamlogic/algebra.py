"""Exact rational polynomial arithmetic and Sturm-sequence root counting.

Coefficients are :class:`fractions.Fraction` throughout.  Two polynomial
types are provided:

* :class:`UniPoly` -- dense univariate polynomials (used for closed-form
  streams, where the indeterminate is ``X``).
* :class:`MultiPoly` -- sparse multivariate polynomials keyed by named
  variables (used by the elimination core).
"""
from __future__ import annotations

from enum import IntEnum
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping

from .errors import DegenerateDivisor, EndpointRoot, UnboundVariable

Rational = Fraction


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class Sign(IntEnum):
    NEG = -1
    ZERO = 0
    POS = 1

    @classmethod
    def of(cls, value) -> "Sign":
        return cls.POS if value > 0 else cls.NEG if value < 0 else cls.ZERO

    def __mul__(self, other):
        if isinstance(other, Sign):
            return Sign(int(self) * int(other))
        return NotImplemented

    def __neg__(self):
        return Sign(-int(self))

    def __str__(self):
        return {-1: "-", 0: "0", 1: "+"}[int(self)]


# ---------------------------------------------------------------------------
# Univariate polynomials


class UniPoly:
    """Dense polynomial over the rationals, coefficients indexed by degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c=1) -> "UniPoly":
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lowdeg(self) -> int:
        """Index of the lowest nonzero coefficient; ``-1`` for zero."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def low(self) -> Fraction:
        """Lowest-order nonzero coefficient (0 for the zero polynomial)."""
        i = self.lowdeg
        return self.coeffs[i] if i >= 0 else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self[i] + other[i] for i in range(n))

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            c = as_rational(other)
            return UniPoly(c * a for a in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        result = UniPoly((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "UniPoly":
        """Multiply by ``X**k`` (``k`` may be negative when divisible)."""
        if k >= 0:
            return UniPoly([0] * k + list(self.coeffs))
        assert all(c == 0 for c in self.coeffs[:-k])
        return UniPoly(self.coeffs[-k:])

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        lc = other.lead()
        dg = other.degree
        for i in range(len(rem) - 1, dg - 1, -1):
            c = rem[i]
            if c:
                f = c / lc
                q[i - dg] = f
                for j, b in enumerate(other.coeffs):
                    rem[i - dg + j] -= f * b
        return UniPoly(q), UniPoly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "UniPoly":
        return self * (1 / self.lead()) if self.coeffs else self

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_str(self, var: str = "X") -> str:
        """Ascending-order rendering, e.g. ``1-X-X^2``."""
        if not self.coeffs:
            return "0"
        out = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else var if i == 1 else f"{var}^{i}"
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if out:
                out.append(("+" if c > 0 else "-") + body)
            else:
                out.append(body if c > 0 else "-" + body)
        return "".join(out)

    def __str__(self):
        return self.to_str()


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def square_free(p: UniPoly) -> UniPoly:
    if p.degree <= 0:
        return p
    return p // uni_gcd(p, p.derivative())


def sturm_sequence(p: UniPoly) -> list[UniPoly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _variations(values) -> int:
    nz = [v for v in values if v != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if (a > 0) != (b > 0))


def sturm_count(p: UniPoly, a, b) -> int:
    """Number of distinct real roots of ``p`` in the open interval (a, b)."""
    a, b = as_rational(a), as_rational(b)
    if not a < b:
        raise ValueError("sturm_count requires a < b")
    if p.is_zero():
        raise EndpointRoot("zero polynomial vanishes everywhere")
    if p(a) == 0 or p(b) == 0:
        raise EndpointRoot(f"polynomial vanishes at an endpoint of ({a}, {b})")
    seq = sturm_sequence(square_free(p))
    return _variations([s(a) for s in seq]) - _variations([s(b) for s in seq])


def root_bound(p: UniPoly) -> Fraction:
    """Cauchy bound: every real root lies strictly inside (-B, B)."""
    lc = abs(p.lead())
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


# ---------------------------------------------------------------------------
# Multivariate polynomials

Monomial = tuple  # sorted tuple of (variable, exponent) pairs, exponents > 0


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_key(m: Monomial):
    # graded, then lexicographic on (variable, exponent) pairs
    return (sum(e for _, e in m), tuple((v, -e) for v, e in m))


@total_ordering
class MultiPoly:
    """Sparse polynomial in named variables with rational coefficients.

    Values are treated as immutable; every operation returns a new object.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict[Monomial, Fraction] = {
            m: c for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    # -- constructors --------------------------------------------------
    @classmethod
    def const(cls, c) -> "MultiPoly":
        return cls({(): as_rational(c)})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MultiPoly":
        return cls({((name, power),) if power else (): Fraction(1)})

    @classmethod
    def from_uni(cls, p: UniPoly, var: str = "X") -> "MultiPoly":
        return cls({((var, i),) if i else (): c for i, c in enumerate(p.coeffs)})

    @classmethod
    def from_coeffs(cls, coeffs: list["MultiPoly"], var: str) -> "MultiPoly":
        out: dict = {}
        for i, c in enumerate(coeffs):
            if not i:
                for m, a in c.terms.items():
                    out[m] = out.get(m, 0) + a
                continue
            for m, a in c.terms.items():
                mm = _mono_mul(m, ((var, i),))
                out[mm] = out.get(mm, 0) + a
        return cls(out)

    # -- basic protocol ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == MultiPoly.const(other).terms
        return NotImplemented

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return tuple((_mono_key(m), c) for m, c in self.sorted_terms())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"MultiPoly({self.to_str()!r})"

    def __str__(self):
        return self.to_str()

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> frozenset[str]:
        return frozenset(v for m in self.terms for v, _ in m)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]), reverse=True)

    def leading_coefficient(self) -> Fraction:
        """Coefficient of the largest monomial in graded order."""
        if not self.terms:
            return Fraction(0)
        return max(self.terms.items(), key=lambda t: _mono_key(t[0]))[1]

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    # -- ring operations ------------------------------------------------
    def __add__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return MultiPoly.const(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = as_rational(other)
            return MultiPoly({m: c * a for m, a in self.terms.items()})
        out: dict = {}
        for m1, a in self.terms.items():
            for m2, b in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + a * b
        return MultiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- structure with respect to one variable --------------------------
    def degree(self, var: str) -> int:
        """Degree in ``var``; ``-1`` for the zero polynomial."""
        if not self.terms:
            return -1
        return max(dict(m).get(var, 0) for m in self.terms)

    def coefficients(self, var: str) -> list["MultiPoly"]:
        """Coefficients as polynomials in the other variables, by degree."""
        buckets: dict[int, dict] = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for v, k in m:
                if v == var:
                    e = k
                else:
                    rest.append((v, k))
            buckets.setdefault(e, {})[tuple(rest)] = c
        n = max(buckets, default=-1)
        return [MultiPoly(buckets.get(i, {})) for i in range(n + 1)]

    def head(self, var: str) -> "MultiPoly":
        cs = self.coefficients(var)
        return cs[-1] if cs else MultiPoly()

    def behead(self, var: str) -> "MultiPoly":
        cs = self.coefficients(var)
        return MultiPoly.from_coeffs(cs[:-1], var) if cs else MultiPoly()

    def derivative(self, var: str) -> "MultiPoly":
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if e:
                if e == 1:
                    del d[var]
                else:
                    d[var] = e - 1
                out[tuple(sorted(d.items()))] = c * e
        return MultiPoly(out)

    def substitute(self, var: str, value: "MultiPoly") -> "MultiPoly":
        cs = self.coefficients(var)
        acc = MultiPoly()
        for c in reversed(cs):
            acc = acc * value + c
        return acc

    def evaluate(self, assignment: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                if v not in assignment:
                    raise UnboundVariable(f"no value for variable {v!r}")
                term *= as_rational(assignment[v]) ** e
            total += term
        return total

    def partial_evaluate(self, assignment: Mapping[str, object]) -> "MultiPoly":
        out: dict = {}
        for m, c in self.terms.items():
            rest = []
            for v, e in m:
                if v in assignment:
                    c = c * as_rational(assignment[v]) ** e
                else:
                    rest.append((v, e))
            key = tuple(rest)
            out[key] = out.get(key, 0) + c
        return MultiPoly(out)

    def to_uni(self, var: str = "X") -> UniPoly:
        cs = self.coefficients(var)
        if any(not c.is_constant() for c in cs):
            raise ValueError(f"{self} is not univariate in {var}")
        return UniPoly(c.constant_value() for c in cs)

    def normalized(self) -> tuple["MultiPoly", int]:
        """Scale so the leading coefficient is 1; return (poly, sign of lc)."""
        lc = self.leading_coefficient()
        if lc == 0:
            return self, 0
        if lc == 1:
            return self, 1
        return self * (1 / lc), (1 if lc > 0 else -1)

    def primitive(self) -> "MultiPoly":
        """Divide by the absolute value of the leading coefficient."""
        lc = self.leading_coefficient()
        return self * (1 / abs(lc)) if lc and abs(lc) != 1 else self

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(parts)


def poly_arith(p: MultiPoly, q: MultiPoly, op: str) -> MultiPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def pseudo_division(p: MultiPoly, q: MultiPoly, var: str):
    """Return ``(quotient, remainder, multiplier)`` with
    ``multiplier*p == quotient*q + remainder`` and
    ``deg_var(remainder) < deg_var(q)``.

    ``multiplier`` is ``lc(q)**(deg p - deg q + 1)`` (or 1 when
    ``deg p < deg q``).
    """
    m = q.degree(var)
    if m <= 0:
        raise DegenerateDivisor(f"{q} is constant in {var}")
    n = p.degree(var)
    if n < m:
        return MultiPoly(), p, MultiPoly.const(1)
    lc = q.head(var)
    quot = MultiPoly()
    rem = p
    for i in range(n, m - 1, -1):
        c = rem.coefficients(var)
        ci = c[i] if i < len(c) else MultiPoly()
        shift = MultiPoly.var(var, i - m)
        quot = quot * lc + ci * shift
        rem = rem * lc - ci * shift * q
    return quot, rem, lc ** (n - m + 1)


def sparse_pseudo_remainder(p: MultiPoly, q: MultiPoly, var: str) -> tuple[int, MultiPoly]:
    """Return ``(k, r)`` with ``lc(q)**k * p = s*q + r`` for some ``s``.

    Only performs reduction steps that are needed, keeping ``k`` small.
    """
    m = q.degree(var)
    if m <= 0:
        raise DegenerateDivisor(f"{q} is constant in {var}")
    qc = q.coefficients(var)
    lc = qc[-1]
    k = 0
    rc = p.coefficients(var)
    while len(rc) - 1 >= m:
        top = rc[-1]
        d = len(rc) - 1 - m
        new = [c * lc for c in rc[:-1]]
        for j, b in enumerate(qc[:-1]):
            new[j + d] = new[j + d] - top * b
        while new and new[-1].is_zero():
            new.pop()
        rc = new
        k += 1
    return k, MultiPoly.from_coeffs(rc, var)


def derivative(p: MultiPoly, var: str) -> MultiPoly:
    return p.derivative(var)


def eval_sign(p: MultiPoly, assignment: Mapping[str, object]) -> Sign:
    return Sign.of(p.evaluate(assignment))
