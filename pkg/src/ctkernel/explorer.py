"""State-space exploration and the metatheory property checks."""
from __future__ import annotations

import multiprocessing
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .generate import DEFAULT_WEIGHTS, GenConfig, generate
from .labels import (CloseL, DispAccL, DispReqL, InlOffL, InlSelL, InrOffL, InrSelL, Label, LinkL, RecvL,
                     RecvTypeL, SendL, SendTypeL, SpawnAccL, SpawnReqL, SyncL, TauL, UseAccL, UseReqL, WaitL)
from .lts import (InternalInvariantViolation, State, Transition, enabled, expand, pending_receives,
                  recv_type_step, transitions, typed_target)
from .serial import derivation_json, dumps, hypersequent_json, trace_json
from .parser import show
from .syntax import _canon, all_names, canonical, free_names, is_terminated
from .typecheck import infer, validate
from .types import ONE, Hypersequent, WhyNot, hs_equal, prop_eq, subst


# -- results -------------------------------------------------------------------------


@dataclass(frozen=True)
class Ok:
    note: str = ""

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class CounterExample:
    property: str
    state: State
    detail: str
    transition: Transition | None = None

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        out = {"process": show(self.state.process), "type": hypersequent_json(self.state.type),
               "detail": self.detail}
        if self.transition is not None:
            t = self.transition
            out["transition"] = {"label": str(t.label), "target": show(t.target.process),
                                 "target_type": hypersequent_json(t.target.type)}
        return out


class Exhausted(Exception):
    """The search budget ran out; inconclusive, not a disproof."""

    def __init__(self, budget: int) -> None:
        super().__init__(f"search budget of {budget} expansions exhausted")
        self.budget = budget


@dataclass
class Trace:
    start: State
    steps: list[tuple[Label, State]] = field(default_factory=list)

    @property
    def end(self) -> State:
        return self.steps[-1][1] if self.steps else self.start

    def to_json(self) -> dict:
        return trace_json(self)


def key(s: State) -> tuple:
    """α-normal identity of a state (the type is determined by the process)."""
    return canonical(s.process)


# -- reachability ------------------------------------------------------------------------


@dataclass
class Reach:
    states: list[State]
    edges: list[tuple[int, Label, int]]
    truncated: bool


def reachable(s: State, max_steps: int, max_states: int | None = None) -> Reach:
    """Breadth-first closure under :func:`transitions`, α-deduplicated.

    ``truncated`` is set when some state at the step bound (or beyond the
    state bound) still has a successor that was not stored.
    """
    index = {key(s): 0}
    states, edges = [s], []
    frontier = deque([(0, 0)])
    truncated = False
    while frontier:
        i, depth = frontier.popleft()
        ts = transitions(states[i])
        for t in ts:
            k = key(t.target)
            j = index.get(k)
            if j is None:
                if depth >= max_steps or (max_states is not None and len(states) >= max_states):
                    truncated = True
                    continue
                j = index[k] = len(states)
                states.append(t.target)
                frontier.append((j, depth + 1))
            edges.append((i, t.label, j))
    return Reach(states, edges, truncated)


# -- weak termination ----------------------------------------------------------------------


def _rank(t: Transition) -> int:
    lab, last = t.label, (t.rules[-1] if t.rules else "")
    if isinstance(lab, (DispAccL, DispReqL)) or (isinstance(lab, TauL) and last == "BangWeaken"):
        return 0
    if isinstance(lab, (SpawnAccL, SpawnReqL)) or (isinstance(lab, TauL) and last == "BangContract"):
        return 3
    return 1 if isinstance(lab, TauL) else 2


def successors(s: State) -> list[Transition]:
    """Transitions in search order: disposal, then τ, then other labels, spawning last.

    A pending type receive contributes one successor with witness 1.
    """
    ts = transitions(s)
    for x in pending_receives(s):
        ts.append(recv_type_step(s, x, ONE))
    return sorted(ts, key=_rank)  # stable: ties keep the traversal order


def find_terminating_trace(s: State, budget: int) -> Trace:
    """Iterative deepening toward a terminated process, counting expansions against ``budget``."""
    if is_terminated(s.process):
        return Trace(s)
    used = 0
    dead: dict[tuple, int] = {}  # state key -> largest depth allowance that failed
    limit = max(1, s.derivation.size())
    while True:
        path: list[tuple[Label, State]] = []
        on_path = {key(s)}

        def dfs(cur: State, allowance: int) -> bool:
            nonlocal used
            if allowance == 0:
                return False
            k = key(cur)
            if dead.get(k, -1) >= allowance:
                return False
            if used >= budget:
                raise Exhausted(budget)
            used += 1
            for t in successors(cur):
                tk = key(t.target)
                if tk in on_path:
                    continue
                path.append((t.label, t.target))
                if is_terminated(t.target.process):
                    return True
                on_path.add(tk)
                found = dfs(t.target, allowance - 1)
                on_path.discard(tk)
                if found:
                    return True
                path.pop()
            dead[k] = max(dead.get(k, -1), allowance)
            return False

        if dfs(s, limit):
            return Trace(s, path)
        limit *= 2


# -- property checks ----------------------------------------------------------------------


def check_progress(s: State) -> Ok | CounterExample:
    if is_terminated(s.process):
        return Ok("terminated")
    if transitions(s) or pending_receives(s):
        return Ok("enabled")
    return CounterExample("progress", s, "not terminated and no transition")


def _effect(lab: Label, before: Hypersequent) -> tuple[dict, set]:
    """What ``lab`` does to the typing of its subjects.

    Returns the prescribed entries (name to proposition, or None when the
    name must vanish) and the names that may vanish because a disposed
    server's context goes with it.
    """
    match lab:
        case SyncL(a, b):
            ea, va = _effect(a, before)
            eb, vb = _effect(b, before)
            return {**ea, **eb}, va | vb
        case CloseL(x) | WaitL(x) | DispReqL(x, _):
            return {x: None}, set()
        case SendL(x, y, a, b) | RecvL(x, y, a, b):
            return {x: b, y: a}, set()
        case InlSelL(x, a, _) | InlOffL(x, a, _):
            return {x: a}, set()
        case InrSelL(x, _, b) | InrOffL(x, _, b):
            return {x: b}, set()
        case SendTypeL(x, a) | RecvTypeL(x, a):
            scheme = before.lookup(x)
            return {x: subst(scheme.body, a, scheme.var)}, set()
        case UseReqL(x, y, a) | UseAccL(x, y, a):
            return {x: None, y: a}, set()
        case SpawnReqL(x, y, _) | SpawnAccL(x, y, _):
            return {x: before.lookup(x), y: before.lookup(x)}, set()
        case DispAccL(x, _):
            seq = before.sequents[before.find(x)]
            return {x: None}, {n for n, a in seq if n != x and isinstance(a, WhyNot)}
        case LinkL(x, y, _):
            return {x: None, y: None}, set()
    raise ValueError(f"no typing effect for {lab}")


def label_conformance(t: Transition) -> str | None:
    """Why the target's type is not the one ``t.label`` prescribes, or None when it is."""
    before, after = t.source.type, t.target.type
    want, may_vanish = _effect(t.label, before)
    copies = dict(t.spawn_map or ())
    for n, a in want.items():
        got = after.lookup(n)
        if a is None and got is not None:
            return f"{n} should be consumed but has type {got}"
        if a is not None and (got is None or not prop_eq(got, a)):
            return f"{n} should have type {a}, has {got}"
    for seq in before:
        for n, a in seq:
            if n in want:
                continue
            got = after.lookup(n)
            if got is None and n in may_vanish:
                continue
            if got is None or not prop_eq(got, a):
                return f"untouched name {n} : {a} became {got}"
            c = copies.get(n)
            if c is not None and c not in want and not prop_eq(after.lookup(c) or a, a):
                return f"spawned copy {c} of {n} has type {after.lookup(c)}"
    known = before.names() | set(want) | set(copies.values())
    extra = sorted(after.names() - known)
    return f"unexpected names {extra}" if extra else None


def check_subject_reduction(s: State) -> Ok | CounterExample:
    """τ keeps the type; every other label changes exactly what it prescribes."""
    for t in transitions(s):
        if isinstance(t.label, TauL):
            if not hs_equal(s.type, t.target.type):
                return CounterExample("subject_reduction", s, "tau changed the type", t)
            continue
        if not validate(t.target.derivation):
            return CounterExample("subject_reduction", s, "target does not validate", t)
        why = label_conformance(t)
        if why:
            return CounterExample("subject_reduction", s, f"label effect: {why}", t)
    return Ok()


# -- population harness ------------------------------------------------------------------


POPULATION_DEPTH = 6
PROGRESS_STEPS = 5


def clear_process_caches() -> None:
    """Drop memoized per-process results.

    Distinct seeds share almost no processes, and a heap full of stale cache
    entries makes every full garbage collection slow.
    """
    for f in (infer, free_names, all_names, canonical, _canon):
        f.cache_clear()


def population(seeds: Iterable[int], max_depth: int = POPULATION_DEPTH) -> Iterator[tuple[int, State]]:
    for seed in seeds:
        clear_process_caches()
        yield seed, State(generate(GenConfig(seed=seed, max_depth=max_depth)))


def _line(seed: int, prop: str, verdict: str, extra: dict | None = None) -> str:
    rec = {"seed": seed, "property": prop, "verdict": verdict}
    if extra:
        rec.update(extra)
    return dumps(rec)


def run_subject_reduction(seeds: Iterable[int], max_depth: int = POPULATION_DEPTH) -> list[str]:
    out = []
    for seed, s in population(seeds, max_depth):
        try:
            r = check_subject_reduction(s)
        except InternalInvariantViolation as e:
            out.append(_line(seed, "subject_reduction", "internal_invariant_violation", {"detail": str(e)}))
            continue
        if r:
            out.append(_line(seed, "subject_reduction", "ok"))
        else:
            out.append(_line(seed, "subject_reduction", "violation", {"counterexample": r.to_json()}))
    return out


def progress_within(s: State, steps: int) -> tuple[int, CounterExample | None]:
    """Check progress on every state reachable from ``s`` in at most ``steps`` transitions.

    States on the last layer are only tested for enabledness, so their
    successors are never built.  Returns the number of distinct states seen
    and the first stuck one, if any.
    """
    seen = {key(s)}
    layer = [s]
    for depth in range(steps + 1):
        nxt = []
        for st in layer:
            if is_terminated(st.process):
                continue
            if depth == steps:
                if not enabled(st):
                    return len(seen), CounterExample("progress", st, "not terminated and no transition")
                continue
            ts, pend = expand(st)
            if not ts and not pend:
                return len(seen), CounterExample("progress", st, "not terminated and no transition")
            for lab, q in ts:
                k = canonical(q)
                if k not in seen:
                    seen.add(k)
                    nxt.append(typed_target(st, lab, q))
        layer = nxt
    return len(seen), None


def run_progress(seeds: Iterable[int], max_depth: int = POPULATION_DEPTH,
                 steps: int = PROGRESS_STEPS) -> list[str]:
    out = []
    for seed, s in population(seeds, max_depth):
        try:
            n, bad = progress_within(s, steps)
        except InternalInvariantViolation as e:
            out.append(_line(seed, "progress", "internal_invariant_violation", {"detail": str(e)}))
            continue
        extra = {"states": n}
        if bad is None:
            out.append(_line(seed, "progress", "ok", extra))
        else:
            extra["counterexample"] = bad.to_json()
            out.append(_line(seed, "progress", "violation", extra))
    return out


def termination_budget(s: State) -> int:
    return 4 * s.derivation.size()


def run_termination(seeds: Iterable[int], max_depth: int = POPULATION_DEPTH) -> list[str]:
    out = []
    for seed, s in population(seeds, max_depth):
        budget = termination_budget(s)
        try:
            tr = find_terminating_trace(s, budget)
        except Exhausted:
            out.append(_line(seed, "weak_termination", "exhausted",
                             {"budget": budget, "counterexample": {
                                 "process": show(s.process), "type": hypersequent_json(s.type)}}))
            continue
        except InternalInvariantViolation as e:
            out.append(_line(seed, "weak_termination", "internal_invariant_violation", {"detail": str(e)}))
            continue
        out.append(_line(seed, "weak_termination", "ok", {"budget": budget, "steps": len(tr.steps)}))
    return out


# -- sharding ---------------------------------------------------------------------------

_RUNNERS = {"subject_reduction": run_subject_reduction, "progress": run_progress,
            "weak_termination": run_termination}


def _shard(job: tuple[str, range]) -> list[str]:
    prop, seeds = job
    return _RUNNERS[prop](seeds)


def run_property(prop: str, seeds: range, workers: int | None = None, chunk: int = 250) -> list[str]:
    """Run one property suite over ``seeds``, split into seed ranges across worker processes.

    Shards are independent and their reports are concatenated in seed order,
    so the output does not depend on the number of workers.
    """
    if prop not in _RUNNERS:
        raise ValueError(f"unknown property {prop!r}; expected one of {sorted(_RUNNERS)}")
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(seeds) <= chunk:
        return _RUNNERS[prop](seeds)
    jobs = [(prop, seeds[i:i + chunk]) for i in range(0, len(seeds), chunk)]
    with multiprocessing.get_context("spawn").Pool(workers) as pool:
        parts = pool.map(_shard, jobs)
    return [line for part in parts for line in part]


__all__ = ["CounterExample", "DEFAULT_WEIGHTS", "Exhausted", "GenConfig", "Ok", "Reach", "Trace",
           "check_progress", "check_subject_reduction", "label_conformance", "derivation_json", "find_terminating_trace",
           "generate", "key", "population", "progress_within", "reachable", "run_progress", "run_subject_reduction",
           "run_property", "run_termination", "successors", "termination_budget"]
