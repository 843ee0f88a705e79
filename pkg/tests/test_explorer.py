import json

import pytest

from ctkernel import (Exhausted, GenConfig, State, check_progress, check_subject_reduction,
                      find_terminating_trace, generate, hs_equal, is_terminated, parse, reachable, show, step)
from ctkernel.explorer import key, run_progress, run_property, run_subject_reduction, run_termination
from ctkernel.typecheck import validate


def test_generation_is_deterministic_and_bounded():
    for seed in range(40):
        a = generate(GenConfig(seed=seed, max_depth=5))
        b = generate(GenConfig(seed=seed, max_depth=5))
        assert show(a.process) == show(b.process) and hs_equal(a.type, b.type)
        assert validate(a) and a.height() <= 4


def test_generator_rejects_bad_configs():
    with pytest.raises(ValueError):
        GenConfig(max_depth=0)
    with pytest.raises(ValueError):
        GenConfig(rule_weights={"Cut": 0})


def test_depth_one_gives_leaves():
    rules = {generate(GenConfig(seed=s, max_depth=1)).rule for s in range(30)}
    assert rules <= {"Ax", "One", "Mix0"}


def test_reachable_deduplicates_up_to_alpha():
    s = State.of(parse("close x | close y"))
    r = reachable(s, 5)
    assert len(r.states) == 4 and not r.truncated
    assert len({key(t) for t in r.states}) == 4
    assert len(r.edges) == 4


def test_reachable_reports_truncation():
    r = reachable(State.of(parse("close x | close y")), 1)
    assert r.truncated and len(r.states) == 3


def test_terminating_trace_replays():
    s = State.of(parse("new (x,y){!x(u).close u | spawn y[y'].?y[a].wait a.?y'[b].wait b.0}"))
    tr = find_terminating_trace(s, 100)
    assert is_terminated(tr.end.process)
    cur = s
    for lab, nxt in tr.steps:
        cur = step(cur, lab)
        assert key(cur) == key(nxt)
    doc = tr.to_json()
    assert json.loads(json.dumps(doc)) == doc


def test_terminated_start_gives_empty_trace():
    assert find_terminating_trace(State.of(parse("0 | 0")), 1).steps == []


def test_exhaustion_is_raised_not_masked():
    s = State.of(parse("new (x,y){!x(u).close u | spawn y[y'].?y[a].wait a.?y'[b].wait b.0}"))
    with pytest.raises(Exhausted):
        find_terminating_trace(s, 1)


def test_progress_and_subject_reduction_on_simple_terms():
    assert check_progress(State.of(parse("x(type X).x(u).link [X] x u")))
    assert check_progress(State.of(parse("0")))
    assert check_subject_reduction(State.of(parse("new (x,y){close x | wait y.0 | close z}")))


def test_suites_emit_one_json_line_per_seed():
    for run in (run_subject_reduction, run_progress, run_termination):
        lines = run(range(5), max_depth=4)
        assert [json.loads(l)["seed"] for l in lines] == list(range(5))
        assert all(json.loads(l)["verdict"] == "ok" for l in lines)


def test_sharding_does_not_change_reports():
    seeds = range(0, 60)
    assert run_property("progress", seeds, workers=2, chunk=20) == run_progress(seeds)


def test_unknown_property():
    with pytest.raises(ValueError):
        run_property("confluence", range(1))


def test_label_conformance_accepts_real_transitions():
    from ctkernel import transitions
    from ctkernel.explorer import label_conformance
    for src in ["x[type 1 as ex X.X].close x", "x2[type ex X.X as ex X.X].link [all X.~X] x2 y3", "!x(y).dispose [bot] z.close y", "close x | wait y.0",
                "x[y].(close y | wait x.0)", "case x {inl: close x; inr: close x}", "link [1] x y",
                "?z[w].wait w.!x(y).dispose [bot] z'.close y | dispose [1] q.0"]:
        for t in transitions(State.of(parse(src))):
            assert label_conformance(t) is None, (src, str(t.label))


def test_label_conformance_rejects_wrong_targets():
    import dataclasses
    from ctkernel import transitions
    from ctkernel.explorer import label_conformance
    (t,) = [t for t in transitions(State.of(parse("close x | close y"))) if str(t.label) == "x[]"]
    assert "consumed" in label_conformance(dataclasses.replace(t, target=State.of(parse("close x | 0"))))
    assert "untouched" in label_conformance(dataclasses.replace(t, target=State.of(parse("0 | 0"))))
    (t,) = transitions(State.of(parse("x[inl:bot].close x")))
    assert "should have type" in label_conformance(dataclasses.replace(t, target=State.of(parse("wait x.0"))))
    assert "unexpected" in label_conformance(dataclasses.replace(t, target=State.of(parse("close x | close z"))))
