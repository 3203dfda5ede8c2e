from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamlogic.algebra import (MultiPoly, Sign, UniPoly, pseudo_division, root_bound,
                                 sparse_pseudo_remainder, square_free, sturm_count, uni_gcd)
from streamlogic.errors import EndpointRoot

small = st.integers(-5, 5)
unipolys = st.lists(small, min_size=1, max_size=5).map(UniPoly)


def test_unipoly_trims_and_degree():
    p = UniPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert UniPoly([0, 0]).is_zero()


def test_divmod_exact():
    p = UniPoly([-1, 0, 1])          # X^2 - 1
    q, r = p.divmod(UniPoly([1, 1]))
    assert q == UniPoly([-1, 1]) and r.is_zero()


@given(unipolys, unipolys.filter(lambda q: not q.is_zero()))
def test_divmod_identity(p, q):
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


def test_gcd_and_square_free():
    a = UniPoly([-1, 1]) * UniPoly([-1, 1]) * UniPoly([2, 1])
    assert uni_gcd(a, a.derivative()).monic() == UniPoly([-1, 1])
    assert square_free(a).monic() == (UniPoly([-1, 1]) * UniPoly([2, 1])).monic()


def test_sturm_counts_roots():
    p = UniPoly([-2, 0, 1])          # roots +-sqrt 2
    assert sturm_count(p, -10, 10) == 2
    assert sturm_count(p, 0, 10) == 1
    assert sturm_count(UniPoly([1, 0, 1]), -10, 10) == 0


def test_sturm_counts_distinct_roots_only():
    p = UniPoly([1, -2, 1])          # (X - 1)^2
    assert sturm_count(p, 0, 2) == 1


def test_sturm_endpoint_root():
    with pytest.raises(EndpointRoot):
        sturm_count(UniPoly([-1, 1]), 1, 2)


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=3, unique=True))
def test_sturm_matches_constructed_roots(roots):
    p = UniPoly([1])
    for r in roots:
        p = p * UniPoly([-r, 1])
    b = root_bound(p)
    assert all(-b < r < b for r in roots)
    assert sturm_count(p, -b, b) == len(roots)


def test_sign_algebra():
    assert Sign.of(Fraction(-3)) == Sign.NEG
    assert Sign.NEG * Sign.NEG == Sign.POS
    assert -Sign.ZERO == Sign.ZERO


def test_multipoly_arith_and_eval():
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    p = (x + y) ** 2
    assert p == x * x + 2 * x * y + y * y
    assert p.evaluate({"x": 1, "y": 2}) == 9
    assert p.degree("x") == 2
    assert p.coefficients("x")[0] == y * y
    assert p.substitute("y", x) == 4 * x * x


def test_multipoly_head_behead():
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    p = 3 * x * x * y + x - 1
    assert p.head("x") == 3 * y
    assert p.behead("x") == x - 1


def test_pseudo_division_identity():
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    p = x * x * y + x + 1
    q = y * x + 2
    quo, rem, mult = pseudo_division(p, q, "x")
    assert mult == q.head("x") ** 2
    assert mult * p == quo * q + rem
    assert rem.degree("x") < q.degree("x")


def test_sparse_remainder_degree():
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    _, r = sparse_pseudo_remainder(x ** 3 + y, y * x + 1, "x")
    assert r.degree("x") < 1


@settings(max_examples=50)
@given(st.dictionaries(st.sampled_from([(), (("x", 1),), (("x", 2),), (("y", 1),)]), small))
def test_multipoly_from_terms_roundtrip(terms):
    p = MultiPoly(terms)
    assert p - p == MultiPoly()
    assert p + MultiPoly() == p
