import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamlogic.errors import ParseError, UnknownIdentifier
from streamlogic.logic import (Add, Atom, Exists, Forall, Mul, RatConst, Sort, Var, XConst,
                               alpha_equivalent, free_vars, is_prenex, nnf, parse, parse_term,
                               prenex, quantifier_count, substitute, term_text, to_text)

ROUND_TRIP = [
    "forall x:S. exists y:L. x*y = 1 /\\ ~x < 0",
    "X^(1/2)*x*x < 1",
    "hd(tl(x)) = cons(1, x)",
    "x divides y -> y != 0 <-> [[1/(1-X)]] <= z",
    "forall x:S. (exists y:S. x = y) \\/ x = 1",
    "exists x:L. -x + 2/3*X = 0",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_print_parse_round_trip(text):
    f = parse(text)
    assert parse(to_text(f)) == f


def test_default_sort_is_series():
    f = parse("forall x. x = 1")
    assert isinstance(f, Forall) and f.sort == Sort.S


def test_relations_normalised():
    # > and >= are stored with swapped sides
    assert to_text(parse("x > 1")) == "1 < x"
    assert to_text(parse("x >= 1")) == "1 <= x"


@pytest.mark.parametrize("text, exc, col", [
    ("x = ", ParseError, 5),
    ("x < < 1", ParseError, 5),
    ("foo(x) = 1", UnknownIdentifier, 1),
    ("forall x:Q. x = 1", ParseError, 10),
    ("x = 1 1", ParseError, 7),
])
def test_parse_errors_carry_position(text, exc, col):
    with pytest.raises(exc) as info:
        parse(text)
    assert f"column {col}" in str(info.value)


def test_parse_term():
    t = parse_term("X*x + 1")
    assert t == Add(Mul(XConst(), Var("x")), RatConst(1))
    assert term_text(t) == "X*x + 1"


def test_free_vars_and_quantifier_count():
    f = parse("forall x. (exists y. x = y) \\/ x = z")
    assert free_vars(f) == {"z"}
    assert quantifier_count(f) == 2


def test_substitution_avoids_capture():
    f = substitute(parse("exists y. x = y"), "x", Var("y"))
    assert isinstance(f, Exists) and f.var != "y"
    assert free_vars(f) == {"y"}


def test_alpha_equivalence():
    assert alpha_equivalent(parse("forall x. x = 1"), parse("forall z. z = 1"))
    assert not alpha_equivalent(parse("forall x. x = y"), parse("forall y. y = y"))


def test_nnf_pushes_negation():
    g = nnf(parse("~(forall x. x = 1 -> x < 2)"))
    assert to_text(g) == "exists x:S. x = 1 /\\ ~x < 2"


def test_prenex_pulls_quantifiers_out():
    f = parse("(forall x. x = 1) /\\ (exists x. x = 2)")
    g = prenex(f)
    assert is_prenex(g)
    assert quantifier_count(g) == 2
    assert free_vars(g) == set()


# printing is a fixpoint of parse-then-print on random formulas

names = st.sampled_from(["x", "y", "z"])
terms = st.recursive(
    st.one_of(names.map(Var), st.integers(-3, 3).map(RatConst), st.just(XConst())),
    lambda inner: st.one_of(st.builds(Add, inner, inner), st.builds(Mul, inner, inner)),
    max_leaves=6,
)
atoms = st.builds(Atom, terms, st.sampled_from(["EQ", "LT", "LE"]), terms)


@settings(max_examples=200)
@given(atoms, names, st.sampled_from([Sort.S, Sort.L]))
def test_random_round_trip(a, v, sort):
    f = Forall(v, sort, a)
    text = to_text(f)
    assert to_text(parse(text)) == text
