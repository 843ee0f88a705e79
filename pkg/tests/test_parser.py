import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctkernel.types import EMPTY as EMPTY_HS
from ctkernel import (GenConfig, ParseError, generate, hs_equal, parse, parse_hypersequent,
                      parse_prop, show, show_hypersequent, show_prop)
from ctkernel.syntax import Close, Par, Res, Wait

from corpus_tools import CORPUS, CP_CORPUS
from test_types import props


def test_precedence_of_par_and_prefixes():
    p = parse("new (x,y){close x | wait y.0}")
    assert isinstance(p, Res) and isinstance(p.body, Par)
    assert isinstance(p.body.left, Close) and isinstance(p.body.right, Wait)


def test_par_is_left_associative():
    p = parse("0 | 0 | close z")
    assert isinstance(p, Par) and isinstance(p.left, Par)


def test_binary_types_are_right_associative():
    a = parse_prop("1 * 1 * bot")
    assert show_prop(a.right) == "1 * bot"


def test_comments_are_ignored():
    assert parse("-- a comment\nclose x -- trailing\n") == parse("close x")


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.ct")) + sorted(CP_CORPUS.glob("*.ct")),
                         ids=lambda p: p.stem)
def test_corpus_round_trips(path):
    p = parse(path.read_text())
    assert parse(show(p)) == p


@given(st.integers(0, 10_000), st.integers(1, 6))
@settings(max_examples=150, deadline=None)
def test_generated_processes_round_trip(seed, d):
    p = generate(GenConfig(seed=seed, max_depth=d)).process
    assert parse(show(p)) == p


@given(props)
def test_props_round_trip(a):
    assert parse_prop(show_prop(a)) == a


@pytest.mark.parametrize("text,line,col", [
    ("close", 1, 6),
    ("x[y].(close y | wait x.0", 1, 25),
    ("new (x,y) close x", 1, 11),
    ("close x\n| wait", 2, 7),
    ("case x {inl: 0}", 1, 15),
])
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.col) == (line, col)
    assert "expected" in str(e.value)


def test_hypersequent_text_format():
    h = parse_hypersequent("x : 1, y : bot || z : ?1")
    assert len(h) == 2
    assert hs_equal(parse_hypersequent(show_hypersequent(h)), h)
    assert hs_equal(parse_hypersequent("(empty)"), EMPTY_HS)
    assert hs_equal(parse_hypersequent("  "), EMPTY_HS)
    assert show_hypersequent(EMPTY_HS) == "(empty)"


def test_hypersequent_name_clash_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_hypersequent("x : 1 || x : bot")
