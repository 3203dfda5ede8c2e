import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamlogic import decide, parse
from streamlogic.errors import UnsupportedFragment
from streamlogic.expand import (ExpansionReport, bisim_formula, eliminate_hd_tl, expand_all,
                                expand_constants, expand_divides, push_hd_tl, relativize, sbar)
from streamlogic.logic import (Add, Atom, Cons, Hd, Mul, Neg, RatConst, StreamConst, Sub, Tl,
                               Var, XConst, atoms, free_vars, quantifier_count, term_text,
                               to_text)
from streamlogic.streams import LaurentRational, cons, hd, tl


# A direct evaluator for ground terms, independent of the rewriting code.

def value(t):
    if isinstance(t, RatConst):
        return LaurentRational.const(t.value)
    if isinstance(t, XConst):
        return LaurentRational.X()
    if isinstance(t, StreamConst):
        return t.value
    if isinstance(t, Add):
        return value(t.left) + value(t.right)
    if isinstance(t, Sub):
        return value(t.left) - value(t.right)
    if isinstance(t, Mul):
        return value(t.left) * value(t.right)
    if isinstance(t, Neg):
        return -value(t.arg)
    if isinstance(t, Hd):
        return LaurentRational.const(hd(value(t.arg)))
    if isinstance(t, Tl):
        return tl(value(t.arg))
    if isinstance(t, Cons):
        return cons(hd(value(t.head)), value(t.tail))
    raise TypeError(t)


series = st.builds(
    lambda num, den: StreamConst(LaurentRational(num, [1] + den)),
    st.lists(st.integers(-3, 3), min_size=1, max_size=3),
    st.lists(st.integers(-2, 2), max_size=2),
)
leaves = st.one_of(series, st.integers(-3, 3).map(RatConst), st.just(XConst()))
ground = st.recursive(
    leaves,
    lambda inner: st.one_of(
        st.builds(Add, inner, inner), st.builds(Mul, inner, inner),
        st.builds(Sub, inner, inner), st.builds(Neg, inner),
        st.builds(Tl, inner), st.builds(lambda a, b: Cons(Hd(a), b), inner, inner),
    ),
    max_leaves=6,
)


@settings(max_examples=300, deadline=None)
@given(ground)
def test_push_hd_tl_preserves_ground_values(t):
    before = value(t)
    after = push_hd_tl(t)
    assert value(after) == before
    assert not any(isinstance(n, (Tl, Hd, Cons)) for n in _nodes(after))


def _nodes(t):
    yield t
    for name in ("left", "right", "arg", "head", "tail"):
        c = getattr(t, name, None)
        if c is not None:
            yield from _nodes(c)


@settings(max_examples=150, deadline=None)
@given(ground, ground, st.sampled_from(["EQ", "LT", "LE"]))
def test_expand_constants_preserves_ground_truth(a, b, rel):
    a, b = push_hd_tl(a), push_hd_tl(b)
    f = Atom(a, rel, b)
    g = expand_constants(f)
    for at in atoms(g):
        for n in (*_nodes(at.lhs), *_nodes(at.rhs)):
            assert not isinstance(n, StreamConst) or n.value.den == LaurentRational.const(1).den
    assert _truth(g) == _truth(f)


def _truth(f):
    from streamlogic.logic import And, Bottom, Not, Or, Top
    if isinstance(f, Atom):
        d = value(f.lhs) - value(f.rhs)
        z = LaurentRational.const(0)
        return {"EQ": d == z, "LT": d < z, "LE": d <= z}[f.rel]
    if isinstance(f, Not):
        return not _truth(f.arg)
    if isinstance(f, And):
        return all(_truth(x) for x in f.args)
    if isinstance(f, Or):
        return any(_truth(x) for x in f.args)
    return isinstance(f, Top) and not isinstance(f, Bottom)


def test_cons_becomes_shift():
    t = push_hd_tl(Cons(RatConst(1), Var("x")))
    assert t == Add(RatConst(1), Mul(XConst(), Var("x")))


def test_tail_of_product_uses_leibniz_rule():
    t = push_hd_tl(Tl(Mul(Var("a"), Var("b"))))
    assert term_text(t) == "tl(a)*b + hd(a)*tl(b)"


def test_divides_introduces_series_witness():
    r = ExpansionReport()
    g = expand_divides(parse("forall x:S. forall y:S. x divides y"), r)
    assert quantifier_count(g) == 3
    assert r.introduced_vars


def test_sbar_shape():
    assert to_text(sbar(Var("x"))) == "X*(x*x) < 1"


def test_relativize_removes_series_sort():
    g = relativize(parse("forall x:S. exists y:S. x = y"))
    assert ":S" not in to_text(g)
    assert "X^(1/2)" in to_text(g)


@pytest.mark.parametrize("text, want", [
    ("exists x:S. x = [[1/X]]", "INVALID"),
    ("exists x:L. x = [[1/X]]", "VALID"),
    ("exists x:S. X*x = 1", "INVALID"),
    ("forall x:S. cons(hd(x), tl(x)) = x", "VALID"),
    ("forall x:S. hd(X*x) = 0", "VALID"),
    ("forall x:S. tl(X*x) = x", "VALID"),
    ("X divides X*X", "VALID"),
    ("X*X divides X", "INVALID"),
])
def test_expansion_end_to_end(text, want):
    assert decide(parse(text)) == want


def test_products_of_open_heads_are_unsupported():
    with pytest.raises(UnsupportedFragment) as info:
        eliminate_hd_tl(parse("forall x:S. forall y:S. hd(x)*hd(y) = 1"))
    assert info.value.details["report"].residual_ops


def test_head_of_laurent_variable_is_unsupported():
    with pytest.raises(UnsupportedFragment):
        expand_all(parse("forall x:L. hd(x) = 0"))


def test_bisim_formula_shape():
    b = bisim_formula(parse("x = y"))
    assert free_vars(b) == set()
    assert "hd(x) = hd(y)" in to_text(b) and "tl(x) = tl(y)" in to_text(b)


def test_bisimulation_verdicts():
    assert decide(bisim_formula(parse("x = y"))) == "VALID"
    assert decide(bisim_formula(parse("x = y + 1"))) == "INVALID"
    assert decide(bisim_formula(parse("x = X*y"))) == "INVALID"


def test_expand_all_reports_rules():
    _, r = expand_all(parse("forall x:S. hd(x) = 0 -> tl(x) = x -> x = 0"))
    assert r.success and r.applied_rules


def test_constant_clearing_keeps_rational_coefficients():
    g = expand_constants(parse("x = [[1/(1-X)]]"))
    assert to_text(g) == "(1 - X)*x = 1"
    g = expand_constants(parse("x < [[1/(1-X)]] + [[X/2]]"))
    assert to_text(g) == "(1 - X)*x < 1 + (1 - X)*(1/2*X)"
