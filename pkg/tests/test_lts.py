import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctkernel import (GenConfig, NoSuchTransition, State, alpha_eq, generate, hs_equal, is_terminated,
                      label_dual, parse, parse_label, show_label, step, transitions)
from ctkernel.explorer import progress_within
from ctkernel.labels import CloseL, RecvTypeL, SyncL, TauL, WaitL, bound_names, label_key
from ctkernel.lts import enabled, expand, pending_receives, recv_type_step, typed_target
from ctkernel.names import name
from ctkernel.parser import parse_prop

from corpus_tools import cases, mismatch, rule_coverage

CASES = cases()

LABELS = ["x[]", "x()", "x[y:1;bot]", "x(y:bot;bot)", "x[inl:1+bot]", "x(inr:1&1)", "x[type 1]",
          "x(type 1)", "?x[y:1]", "!x(y:1)", "?x[+x':bot]", "!x(+x':1)", "?x[-:1]", "!x(-:1)",
          "x<->y:1", "<x[],y()>", "tau"]


@pytest.mark.parametrize("text", LABELS)
def test_label_text_round_trips(text):
    assert show_label(parse_label(text)) == text


@pytest.mark.parametrize("a,b", [("x[]", "y()"), ("x[u:1;bot]", "y(v:bot;1)"), ("x[inl:1+bot]", "y(inl:bot&1)"),
                                 ("x[type 1]", "y(type 1)"), ("?x[u:1]", "!y(v:bot)"),
                                 ("?x[+x':1]", "!y(+y':bot)"), ("?x[-:1]", "!y(-:bot)")])
def test_dual_label_pairs(a, b):
    la, lb = parse_label(a), parse_label(b)
    assert label_dual(la, lb) and label_dual(lb, la)


def test_non_dual_labels():
    assert not label_dual(parse_label("x[inl:1+bot]"), parse_label("y(inr:bot&1)"))
    assert not label_dual(parse_label("x[u:1;bot]"), parse_label("y(v:1;1)"))
    assert not label_dual(TauL(), TauL())


def test_bound_names_and_keys():
    lab = parse_label("x[y:1;bot]")
    assert bound_names(lab) == {name("y")}
    assert label_key(lab) == label_key(parse_label("x[z:1;bot]"))
    assert label_key(lab) != label_key(parse_label("w[z:1;bot]"))


@pytest.mark.parametrize("case", CASES, ids=lambda c: c.path.stem)
def test_corpus_transitions_are_exact(case):
    assert mismatch(case) is None


def test_corpus_covers_every_transition_rule():
    _, lts = rule_coverage(CASES)
    for tag in ("Par1", "Par2", "Syn", "Res", "OneBot", "TensorPar", "PlusWith1", "PlusWith2", "BangQuest",
                "BangWeaken", "BangContract", "ExistsForall", "Ax1", "Ax2"):
        assert lts[tag] > 0, tag


def test_spawn_records_the_renaming():
    s = State.of(parse("!x(y).dispose [bot] z.close y"))
    (t,) = [t for t in transitions(s) if "server-spawn" in " ".join(t.rules)]
    assert dict(t.spawn_map) == {name("x"): name("x'"), name("z"): name("z'")}
    assert hs_equal(t.target.type, State.of(t.target.process).type)


def test_pending_type_receive_fires_with_a_witness():
    s = State.of(parse("x(type X).x(u).link [X] x u"))
    assert transitions(s) == [] and pending_receives(s) == [name("x")]
    t = recv_type_step(s, name("x"), parse_prop("1 * bot"))
    assert isinstance(t.label, RecvTypeL)
    assert t.target.process == parse("x(u).link [1 * bot] x u")
    assert step(s, parse_label("x(type 1)")).process == parse("x(u).link [1] x u")
    assert enabled(s)


def test_step_rejects_absent_labels():
    s = State.of(parse("close x"))
    with pytest.raises(NoSuchTransition):
        step(s, WaitL(name("x")))
    assert is_terminated(step(s, CloseL(name("x"))).process)


def test_synchronisation_on_separate_sequents():
    s = State.of(parse("close x | wait y.0"))
    syn = [t for t in transitions(s) if isinstance(t.label, SyncL)]
    assert len(syn) == 1 and alpha_eq(syn[0].target.process, parse("0 | 0"))


def test_expand_agrees_with_transitions():
    s = State.of(parse("new (x,y){close x | wait y.0 | close z}"))
    ts, pend = expand(s)
    assert not pend
    assert [show_label(lab) for lab, _ in ts] == [show_label(t.label) for t in transitions(s)]
    for lab, q in ts:
        assert hs_equal(typed_target(s, lab, q).type, next(t for t in transitions(s) if t.label == lab).target.type)


STUCK = ("new (x7,y12){new (x3,u13){!x7(x1).?x3[y2].link [bot] x1 y2 | "
         "(!u13(u14).close u14 | dispose [bot] y12.0)}}")


def test_known_stuck_state_is_reported():
    s = State.of(parse(STUCK))
    assert not is_terminated(s.process) and transitions(s) == [] and not enabled(s)
    n, bad = progress_within(s, 0)
    assert bad is not None and bad.property == "progress"


@given(st.integers(0, 100_000), st.integers(1, 5))
@settings(max_examples=150, deadline=None)
def test_targets_carry_their_own_synthesised_type(seed, depth):
    s = State(generate(GenConfig(seed=seed, max_depth=depth)))
    for t in transitions(s):
        assert hs_equal(t.target.type, State.of(t.target.process).type)
        if isinstance(t.label, TauL):
            assert hs_equal(t.target.type, s.type)
