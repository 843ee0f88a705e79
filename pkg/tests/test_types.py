from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from ctkernel import Hypersequent, Sequent, dual, hs_equal, hs_merge, is_client_context, name, subst
from ctkernel.names import Name, fresh
from ctkernel.parser import parse_prop
from ctkernel.types import (BOT, ONE, TOP, ZERO, Atom, DualAtom, Exists, Forall, NameClash, OfCourse,
                            Parr, Plus, Tensor, WhyNot, With, depth, ftv, prop_eq)

X, Y = Name("X"), Name("Y")

props = st.recursive(
    st.sampled_from([ONE, BOT, ZERO, TOP, Atom(X), DualAtom(X), Atom(Y), DualAtom(Y)]),
    lambda sub: st.one_of(
        st.builds(Tensor, sub, sub), st.builds(Parr, sub, sub), st.builds(Plus, sub, sub),
        st.builds(With, sub, sub), st.builds(OfCourse, sub), st.builds(WhyNot, sub),
        st.builds(Exists, st.sampled_from([X, Y]), sub), st.builds(Forall, st.sampled_from([X, Y]), sub)),
    max_leaves=12)


def test_names_and_primes():
    assert name("x''") == Name("x", 2)
    assert str(Name("x", 1)) == "x'"
    assert fresh(name("x"), {name("x"), name("x'")}) == Name("x", 2)
    with pytest.raises(ValueError):
        name("1x")


def test_dual_of_connectives():
    assert prop_eq(dual(parse_prop("1 * bot")), parse_prop("bot par 1"))
    assert prop_eq(dual(parse_prop("!(1 + X)")), parse_prop("?(bot & ~X)"))
    assert prop_eq(dual(parse_prop("ex X.X * ~X")), parse_prop("all X.~X par X"))
    assert dual(ZERO) == TOP and dual(TOP) == ZERO


@given(props)
def test_dual_is_an_involution(a):
    assert dual(dual(a)) == a


@given(props, props, st.sampled_from([X, Y]))
@settings(max_examples=300)
def test_dual_commutes_with_substitution(b, a, v):
    assert prop_eq(dual(subst(b, a, v)), subst(dual(b), a, v))


def test_the_form_with_dualised_witness_is_false():
    # dual(subst(X, 1, X)) is bot, but subst(~X, bot, X) is dual(bot) = 1.
    b, a = Atom(X), ONE
    assert not prop_eq(dual(subst(b, a, X)), subst(dual(b), dual(a), X))


def test_subst_avoids_capture():
    body = Exists(Y, Tensor(Atom(X), Atom(Y)))
    out = subst(body, Atom(Y), X)
    assert isinstance(out, Exists) and out.var != Y
    assert ftv(out) == {Y}


def test_alpha_equivalence_of_props():
    assert prop_eq(parse_prop("ex X.X"), parse_prop("ex Y.Y"))
    assert not prop_eq(parse_prop("ex X.X"), parse_prop("ex Y.X"))


def test_depth_counts_leaves_as_one():
    assert depth(ONE) == 1
    assert depth(parse_prop("1 * (bot par X)")) == 3


def test_sequents_and_hypersequents():
    x, y, z = name("x"), name("y"), name("z")
    s = Sequent.of({y: ONE, x: BOT})
    assert [n for n, _ in s] == [x, y]
    with pytest.raises(NameClash):
        s.add(x, ONE)
    g = Hypersequent.of([{z: ONE}, s, {}])
    assert len(g) == 2 and g.lookup(z) == ONE
    with pytest.raises(NameClash):
        hs_merge(g, Hypersequent.of([{x: ONE}]))
    assert hs_equal(Hypersequent.of([{x: parse_prop("ex X.X")}]), Hypersequent.of([{x: parse_prop("ex Y.Y")}]))
    assert is_client_context(Sequent.of({x: WhyNot(ONE)}))
    assert not is_client_context(Sequent.of({x: ONE}))


def test_hashes_distinguish_constructors():
    a, b = Atom(X), DualAtom(X)
    assert len({Tensor(a, b), Parr(a, b), Plus(a, b), With(a, b)}) == 4
    assert len({hash(ONE), hash(BOT), hash(ZERO), hash(TOP)}) == 4
