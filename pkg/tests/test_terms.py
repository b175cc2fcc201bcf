import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramsey_workbench.chains import Chain, ChainMap, enumerate_rigid_surjections
from ramsey_workbench.terms import (
    XI,
    App,
    Cmp,
    Signature,
    Var,
    check_mu_rigid,
    check_subst_rigid,
    check_term,
    enumerate_neat,
    flatten,
    iter_neat,
    neat_compare,
    neat_key,
    parse_term,
    preimages_under_flatten,
    render,
    shape_length,
    shape_of,
    shapes_of_length,
    substitute,
    term_from_json,
    term_to_json,
    unit,
    variables,
)

SIG = Signature.of(f=3, g=2, c=0)
G2 = Signature.of(g=2)
MIXED = Signature.of(h=1, c=0, g=2)


def spelled(t, sig):
    """Independent spelling: one token per symbol, mapped to its alphabet position."""
    alphabet = ["VAR"] + list(sig.constants) + list(sig.functions) + ["(", ",", ")"]
    pos = {a: i for i, a in enumerate(alphabet)}

    def walk(s):
        if isinstance(s, Var):
            return ["VAR"]
        if not s.args:
            return [s.op]
        out = [s.op, "("]
        for i, a in enumerate(s.args):
            if i:
                out.append(",")
            out += walk(a)
        return out + [")"]

    toks = walk(t)
    return (len(toks), tuple(pos[x] for x in toks), tuple(variables(t)))


def grow(sig, nvars, limit):
    """All terms of spelled length at most ``limit``, by closing under the operations."""
    level = {Var(i) for i in range(nvars)} | {App(c) for c in sig.constants}
    while True:
        new = set(level)
        for f in sig.functions:
            for args in itertools.product(sorted(level, key=repr), repeat=sig.arity(f)):
                t = App(f, args)
                if len(spelled(t, sig)[1]) <= limit:
                    new.add(t)
        if new == level:
            return level
        level = new


@st.composite
def terms(draw, sig=SIG, nvars=3, depth=3):
    if depth == 0 or draw(st.booleans()):
        leaves = [Var(i) for i in range(nvars)] + [App(c) for c in sig.constants]
        return draw(st.sampled_from(leaves))
    f = draw(st.sampled_from(sig.functions))
    return App(f, tuple(draw(terms(sig, nvars, depth - 1)) for _ in range(sig.arity(f))))


class TestSignature:
    def test_constants_first(self):
        assert MIXED.names == ("c", "h", "g")
        assert MIXED.rank("c") == 1 and MIXED.rank("h") == 2

    def test_punctuation_after_symbols(self):
        assert (MIXED.lparen, MIXED.comma, MIXED.rparen) == (4, 5, 6)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Signature((("g", 2), ("g", 1)))

    def test_json(self):
        assert Signature.from_json(SIG.to_json()) == SIG


def test_shape_example():
    t = parse_term("f(g(x2,x1),c,x1)", SIG)
    assert render(shape_of(t)) == "f(g(ξ,ξ),c,ξ)"
    assert shape_length(t) == len("f(g(ξ,ξ),c,ξ)") == 13
    assert variables(t) == [1, 0, 0]


def test_render_parse_round_trip():
    for text in ["x1", "c", "g(x1,c)", "f(g(x2,x1),c,x1)"]:
        assert render(parse_term(text, SIG)) == text


@pytest.mark.parametrize("bad", ["g(x1)", "q(x1)", "g(x1,x2", "g(x1,x2))", ""])
def test_parse_errors(bad):
    with pytest.raises((ValueError, IndexError)):
        parse_term(bad, SIG)


def test_check_term_arity():
    with pytest.raises(ValueError):
        check_term(App("g", (Var(0),)), SIG)


@given(terms())
def test_json_round_trip(t):
    assert term_from_json(term_to_json(t)) == t


def test_json_nested_and_xi():
    t = App("g", (Var(Var(0)), Var(XI)))
    assert term_from_json(term_to_json(t)) == t


def test_variables_before_constants_before_compound():
    order = enumerate_neat(SIG, 2, 6)
    assert order[:3] == [Var(0), Var(1), App("c")]
    assert all(isinstance(t, App) and t.args for t in order[3:])


def test_shapes_of_length_one():
    assert shapes_of_length(SIG, 1) == (Var(XI), App("c"))


@pytest.mark.parametrize("sig", [G2, SIG, MIXED, Signature.of(h=1)])
@pytest.mark.parametrize("nvars", [1, 2])
def test_neat_enumeration_matches_independent_sort(sig, nvars):
    limit = 9
    expected = sorted(grow(sig, nvars, limit), key=lambda t: spelled(t, sig))
    assert enumerate_neat(sig, nvars, limit) == expected


@given(terms(), terms())
def test_neat_key_agrees_with_spelling(a, b):
    expected = Cmp.EQ if a == b else (Cmp.LT if spelled(a, SIG) < spelled(b, SIG) else Cmp.GT)
    assert neat_compare(a, b, SIG) == expected


def test_labelled_variables():
    chain = Chain.of("yx")
    assert neat_compare(Var("y"), Var("x"), G2, chain) == Cmp.LT


def test_iter_neat_finite_without_functions():
    assert list(iter_neat(Signature.of(c=0, d=0), 2)) == [Var(0), Var(1), App("c"), App("d")]


def test_iter_neat_prefix():
    assert list(itertools.islice(iter_neat(G2, 2), 6)) == enumerate_neat(G2, 2, 6)[:6]


@given(terms())
def test_unit_laws(t):
    assert flatten(unit(t)) == t
    assert flatten(substitute(unit, t)) == t


@given(terms(nvars=2))
def test_associativity(t):
    # a term over terms over terms, built by wrapping each variable twice
    ttt = substitute(lambda v: Var(Var(v)), substitute(unit, t))
    assert flatten(flatten(ttt)) == flatten(substitute(flatten, ttt))


@given(terms())
def test_preimages_flatten_back(t):
    pre = preimages_under_flatten(t)
    assert Var(t) in pre
    assert all(flatten(p) == t for p in pre)


def test_flatten_rejects_plain_variables():
    with pytest.raises(TypeError):
        flatten(Var(0))


def test_substitute_forms():
    t = parse_term("g(x1,x2)", G2)
    f = ChainMap(2, 1, (0, 0))
    assert substitute(f, t) == substitute([0, 0], t) == substitute(lambda v: 0, t) == parse_term("g(x1,x1)", G2)


@pytest.mark.parametrize("sig", [G2, SIG])
def test_substitution_rigid(sig):
    for n in range(1, 4):
        for k in range(1, n + 1):
            for f in enumerate_rigid_surjections(n, k):
                assert check_subst_rigid(f, sig, 7)


def test_substitution_rejects_non_rigid():
    with pytest.raises(ValueError):
        check_subst_rigid(ChainMap(2, 2, (1, 0)), G2, 5)


@pytest.mark.parametrize("sig", [G2, SIG, MIXED])
def test_flatten_rigid(sig):
    assert check_mu_rigid(sig, 2, 8)


def test_neat_key_components():
    key = neat_key(parse_term("g(x2,x1)", G2), G2)
    assert key.shape_length == 6 and key.var_tuple == (1, 0)
