import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctkernel import GenConfig, check, generate, hs_equal, infer, parse, parse_hypersequent, validate
from ctkernel.typecheck import RULES, TypingError, diagnose

from corpus_tools import cases


@pytest.mark.parametrize("src,kind", [
    ("close x | close x", "NameClash"),
    ("wait x.close x", "NameClash"),
    ("new (x,y){close x | close y}", "NotDual"),
    ("new (x,y){link [1] x y}", "NotInDistinctSequents"),
    ("case x {inl: wait z.close x; inr: close x}", "BranchMismatch"),
    ("!x(y).wait z.close y", "NonClientContext"),
    ("x[y].(close y | close x | close z)", "AmbientContext"),
    ("x(y).(close y | close x)", "AmbientContext"),
    ("x(y).close x", "SubjectMissing"),
    ("new (x,y){close x | wait z.0}", "SubjectMissing"),
    ("x[type 1 as ex X.X].wait x.0", "TypeMismatch"),
    ("spawn x[x'].(?x[a].wait a.0 | close x')", "AmbientContext"),
    ("x(type X).wait x.dispose [X] z.0", "TypeVarEscape"),
])
def test_each_error_class(src, kind):
    with pytest.raises(TypingError) as e:
        infer(parse(src))
    assert e.value.kind == kind


def test_error_path_points_at_the_subterm():
    with pytest.raises(TypingError) as e:
        infer(parse("x(type X).x(u).link [X] x z"))
    assert e.value.path == (0,)
    assert str(e.value).startswith("SubjectMissing at 0:")


def test_check_compares_up_to_alpha_and_order():
    p = parse("link [ex X.X] x y")
    check(p, parse_hypersequent("y : ex Y.Y, x : all Z.~Z"))
    with pytest.raises(TypingError) as e:
        check(p, parse_hypersequent("x : ex X.X, y : all X.~X"))
    assert e.value.kind == "TypeMismatch"


def test_one_tensor_bot_witness():
    d = infer(parse("x[y].(close y | wait x.0)"))
    assert hs_equal(d.type, parse_hypersequent("x : 1 * bot"))
    assert d.height() == 3
    assert [n.rule for n in d.nodes()] == ["Tensor", "Mix", "One", "Bot", "Mix0"]


def test_every_rule_appears_in_the_corpus():
    used = {n.rule for c in cases() for n in infer(parse(c.source)).nodes()}
    assert used == set(RULES)


def test_diagnose_flags_tampered_nodes():
    d = infer(parse("new (x,y){close x | wait y.0}"))
    assert validate(d)
    bad_leaf = dataclasses.replace(d.premises[0].premises[0], type=parse_hypersequent("x : bot"))
    bad_mix = dataclasses.replace(d.premises[0], premises=(bad_leaf, d.premises[0].premises[1]))
    bad = dataclasses.replace(d, premises=(bad_mix,))
    rep = diagnose(bad)
    assert not rep and rep.problems


def test_diagnose_rejects_wrong_rule_name():
    d = infer(parse("close x"))
    assert not validate(dataclasses.replace(d, rule="Bot"))


@given(st.integers(0, 100_000), st.integers(1, 6))
@settings(max_examples=200, deadline=None)
def test_generated_derivations_agree_with_synthesis(seed, depth):
    d = generate(GenConfig(seed=seed, max_depth=depth))
    assert validate(d)
    again = infer(d.process)
    assert hs_equal(again.type, d.type)
    assert again.height() < depth
