"""Labelled transitions over typed states.

A state is a typing derivation.  Transitions are computed structurally:
prefix-rooted processes contribute axioms, parallel composition propagates
and synchronises, and restriction either propagates a label or consumes a
synchronisation (or a link) through one of the cut-elimination rules.

Internally a transition under construction is a :class:`_Move` whose target
is built lazily from a :class:`Hooks` value.  Hooks let an enclosing cut rule
reach back into the position of an action prefix: rule !W wraps dispose
prefixes around the client's continuation, and rule for type communication
fixes the witness of a pending type receive.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

from .labels import (PARTNER, CloseL, DispAccL, DispReqL, InlOffL, InlSelL, InrOffL, InrSelL, Label, LinkL,
                     RecvL, RecvTypeL, SendL, SendTypeL, SpawnAccL, SpawnReqL, SyncL, Tau, TauL,
                     UseAccL, UseReqL, WaitL, bound_names, label_dual, label_key, names)
from .names import Name, fresh
from .syntax import (NIL, Case, ClientDispose, ClientSpawn, ClientUse, Close, InL, InR, Link, Nil, Par,
                     Process, Recv, RecvType, Res, Send, SendType, Server, Wait, all_names,
                     free_names, rename, subst_type, uniquify)
from .typecheck import Derivation, TypingError, infer
from .types import Atom, Hypersequent, OfCourse, Parr, Plus, Prop, Tensor, WhyNot, With


class InternalInvariantViolation(Exception):
    """A rule produced a target that does not re-infer (subject-reduction tripwire).

    ``raised`` counts constructions in this process, caught or not.
    """

    raised = 0

    def __init__(self, *args: object) -> None:
        super().__init__(*args)
        InternalInvariantViolation.raised += 1


class NoSuchTransition(Exception):
    def __init__(self, label: object, available: list[str]) -> None:
        shown = ", ".join(available) or "none"
        super().__init__(f"no transition labelled {label}; available: {shown}")
        self.label = label
        self.available = available


@dataclass(frozen=True)
class State:
    derivation: Derivation

    @property
    def process(self) -> Process:
        return self.derivation.process

    @property
    def type(self) -> Hypersequent:
        return self.derivation.type

    @staticmethod
    def of(p: Process) -> State:
        return State(infer(p))

    def __str__(self) -> str:
        return f"{self.process} :: {self.type}"


@dataclass(frozen=True)
class Transition:
    source: State
    label: Label
    target: State
    spawn_map: tuple[tuple[Name, Name], ...] | None = None
    rules: tuple[str, ...] = ()


class Hooks(NamedTuple):
    out: Callable[[Process], Process] = lambda q: q
    inp: Callable[[Process], Process] = lambda q: q
    witness: Prop | None = None


_ID = Hooks()


class _Move:
    """A move of a subderivation; ``build`` makes the target once hooks are known.

    A plain slotted class: moves are rewrapped at every enclosing rule, so
    construction cost matters.
    """

    __slots__ = ("label", "build", "rules", "spawn_map", "gone", "pending")

    def __init__(self, label: Label, build: Callable[[Hooks], Process], rules: tuple[str, ...],
                 spawn_map: dict[Name, Name] | None = None, gone: frozenset[Name] = frozenset(),
                 pending: bool = False) -> None:
        self.label = label
        self.build = build
        self.rules = rules
        self.spawn_map = spawn_map
        self.gone = gone  # free names a server action makes vanish
        self.pending = pending  # type receive awaiting its witness

    def wrap(self, f: Callable[[Process], Process], rule: str) -> _Move:
        b = self.build
        return _Move(self.label, lambda h: f(b(h)), self.rules + (rule,), self.spawn_map,
                     self.gone, self.pending)


def _entry(d: Derivation, x: Name) -> Prop:
    a = d.type.lookup(x)
    assert a is not None, f"{x} untyped in {d.type}"
    return a


# -- axioms -------------------------------------------------------------------


def _axioms(d: Derivation, avoid: frozenset[Name]) -> list[_Move]:
    p = d.process
    const = lambda q: (lambda h: q)  # noqa: E731
    match p:
        case Close(x):
            return [_Move(CloseL(x), lambda h: h.out(NIL), ("ax:close",))]
        case Wait(x, q):
            return [_Move(WaitL(x), lambda h, q=q: h.inp(q), ("ax:wait",))]
        case Send(x, y, q):
            t = _entry(d, x)
            assert isinstance(t, Tensor)
            return [_Move(SendL(x, y, t.left, t.right), lambda h, q=q: h.out(q), ("ax:send",))]
        case Recv(x, y, q):
            t = _entry(d, x)
            assert isinstance(t, Parr)
            return [_Move(RecvL(x, y, t.left, t.right), lambda h, q=q: h.inp(q), ("ax:recv",))]
        case InL(x, _, q) | InR(x, _, q):
            t = _entry(d, x)
            assert isinstance(t, Plus)
            cls = InlSelL if isinstance(p, InL) else InrSelL
            return [_Move(cls(x, t.left, t.right), lambda h, q=q: h.out(q), ("ax:select",))]
        case Case(x, l, r):
            t = _entry(d, x)
            assert isinstance(t, With)
            return [_Move(InlOffL(x, t.left, t.right), lambda h, q=l: h.inp(q), ("ax:offer",)),
                    _Move(InrOffL(x, t.left, t.right), lambda h, q=r: h.inp(q), ("ax:offer",))]
        case SendType(x, w, _, _, q):
            return [_Move(SendTypeL(x, w), lambda h, q=q: h.out(q), ("ax:sendtype",))]
        case RecvType(x, v, q):
            def build(h: Hooks, q=q, v=v) -> Process:
                assert h.witness is not None, "pending type receive built without a witness"
                return h.inp(subst_type(q, {v: h.witness}))
            return [_Move(RecvTypeL(x, Atom(v)), build, ("ax:recvtype",), pending=True)]
        case Link(a, x, y):
            return [_Move(LinkL(x, y, a), const(NIL), ("ax:link",))]
        case ClientUse(x, y, q):
            t = _entry(d, x)
            assert isinstance(t, WhyNot)
            return [_Move(UseReqL(x, y, t.body), lambda h, q=q: h.out(q), ("ax:use",))]
        case ClientSpawn(x, y, q):
            t = _entry(d, x)
            assert isinstance(t, WhyNot)
            return [_Move(SpawnReqL(x, y, t.body), lambda h, q=q: h.out(q), ("ax:spawn",))]
        case ClientDispose(x, a, q):
            return [_Move(DispReqL(x, a), lambda h, q=q: h.out(q), ("ax:dispose",))]
        case Server(x, y, q):
            t = _entry(d, x)
            assert isinstance(t, OfCourse)
            a = t.body
            ctx = free_names(p) - {x}
            smap: dict[Name, Name] = {}
            taken = set(avoid)
            for z in sorted(free_names(p)):
                z2 = fresh(z, taken)
                taken.add(z2)
                smap[z] = z2

            def spawned(h: Hooks, p=p, q=q, x2=smap[x], ren={z: smap[z] for z in ctx}) -> Process:
                return h.inp(Par(p, Server(x2, y, rename(q, ren))))
            return [
                _Move(UseAccL(x, y, a), lambda h, q=q: h.inp(q), ("ax:server-use",)),
                _Move(DispAccL(x, a), lambda h: h.inp(NIL), ("ax:server-dispose",), gone=ctx),
                _Move(SpawnAccL(x, smap[x], a), spawned,
                      ("ax:server-spawn",), spawn_map=smap),
            ]
    return []


# -- structural rules ---------------------------------------------------------


def _moves(d: Derivation, avoid: frozenset[Name]) -> list[_Move]:
    p = d.process
    if isinstance(p, Par):
        return _par(d, avoid)
    if isinstance(p, Res):
        return _res(d, avoid)
    return _axioms(d, avoid)


def _par(d: Derivation, avoid: frozenset[Name]) -> list[_Move]:
    p = d.process
    assert isinstance(p, Par)
    dl, dr = d.premises
    left, right = _moves(dl, avoid), _moves(dr, avoid)
    fl, fr = free_names(p.left), free_names(p.right)
    out: list[_Move] = []
    for m in left:
        if not (bound_names(m.label) & fr):
            out.append(m.wrap(lambda q, r=p.right: Par(q, r), "Par1"))
    for m in right:
        if not (bound_names(m.label) & fl):
            out.append(m.wrap(lambda q, l=p.left: Par(l, q), "Par2"))
    by_class: dict[type, list[_Move]] = {}
    for mr in right:
        by_class.setdefault(type(mr.label), []).append(mr)
    for ml in left:
        for mr in by_class.get(_PARTNER_OF.get(type(ml.label)), ()):
            s = _sync(ml, mr)
            if s is not None:
                out.append(s)
    return out


_PARTNER_OF = {**PARTNER, **{v: k for k, v in PARTNER.items()}}


def _sync(ml: _Move, mr: _Move) -> _Move | None:
    a, b = ml.label, mr.label
    if isinstance(a, (SyncL, TauL, LinkL)) or isinstance(b, (SyncL, TauL, LinkL)):
        return None
    # a pending type receive takes the sender's witness
    witness: Prop | None = None
    if mr.pending and isinstance(a, SendTypeL):
        witness, b = a.a, RecvTypeL(b.subject, a.a)
    elif ml.pending and isinstance(b, SendTypeL):
        witness, a = b.a, RecvTypeL(a.subject, b.a)
    elif ml.pending or mr.pending:
        return None
    if not label_dual(a, b):
        return None
    lab = SyncL(a, b) if a.output else SyncL(b, a)
    bl, br = ml.build, mr.build

    def build(h: Hooks) -> Process:
        if witness is not None:
            h = h._replace(witness=witness)
        return Par(bl(h), br(h))

    smap = ml.spawn_map or mr.spawn_map
    return _Move(lab, build, ml.rules + mr.rules + ("Syn",), smap, ml.gone | mr.gone)


def _res(d: Derivation, avoid: frozenset[Name]) -> list[_Move]:
    p = d.process
    assert isinstance(p, Res)
    x, y = p.left, p.right
    body = d.premises[0]
    out: list[_Move] = []
    for m in _moves(body, avoid):
        lab = m.label
        if isinstance(lab, TauL):
            out.append(m.wrap(lambda q: Res(x, y, q), "Res"))
            continue
        if isinstance(lab, SyncL) and {lab.out.subject, lab.inp.subject} == {x, y}:
            r = _cut(p, body, m, avoid)
            if r is not None:
                out.append(r)
            continue
        if isinstance(lab, LinkL) and (lab.src in (x, y) or lab.dst in (x, y)):
            out.append(_link_cut(p, m))
            continue
        if x in names(lab) or y in names(lab) or x in m.gone or y in m.gone:
            continue
        if m.pending and lab.subject in (x, y):
            continue
        out.append(m.wrap(lambda q: Res(x, y, q), "Res"))
    return out


def _link_cut(p: Res, m: _Move) -> _Move:
    lab = m.label
    assert isinstance(lab, LinkL)
    x, y = p.left, p.right
    if lab.dst in (x, y):
        # rule Ax1: the link's second endpoint is cut; its partner takes the first
        other = y if lab.dst == x else x
        mapping, rule = {other: lab.src}, "Ax1"
    else:
        other = y if lab.src == x else x
        mapping, rule = {other: lab.dst}, "Ax2"
    b = m.build
    return _Move(Tau, lambda h: rename(b(_ID), mapping), m.rules + (rule,))


def _oriented(p: Res, out_subject: Name, a: Name, b: Name) -> tuple[Name, Name]:
    """Order an inner restriction (a on the output side) like the outer one."""
    return (a, b) if p.left == out_subject else (b, a)


def _cut(p: Res, body: Derivation, m: _Move, avoid: frozenset[Name]) -> _Move | None:
    lab = m.label
    assert isinstance(lab, SyncL)
    o, i = lab.out, lab.inp
    x, y = p.left, p.right
    b = m.build
    res = lambda q: Res(x, y, q)  # noqa: E731
    match o:
        case CloseL():
            return _Move(Tau, lambda h: b(_ID), m.rules + ("OneBot",))
        case SendL(s, s2, _, _):
            ix, iy = _oriented(p, s, s2, i.obj)
            return _Move(Tau, lambda h: res(Res(ix, iy, b(_ID))), m.rules + ("TensorPar",))
        case InlSelL():
            return _Move(Tau, lambda h: res(b(_ID)), m.rules + ("PlusWith1",))
        case InrSelL():
            return _Move(Tau, lambda h: res(b(_ID)), m.rules + ("PlusWith2",))
        case SendTypeL():
            return _Move(Tau, lambda h: res(b(_ID)), m.rules + ("ExistsForall",))
        case UseReqL(c, c2, _):
            ix, iy = _oriented(p, c, c2, i.obj)
            return _Move(Tau, lambda h: Res(ix, iy, b(_ID)), m.rules + ("BangQuest",))
        case DispReqL():
            zs = sorted(m.gone)
            annots = []
            for z in zs:
                t = body.type.lookup(z)
                if not isinstance(t, WhyNot):
                    return None
                annots.append((z, t.body))

            def disposes(q: Process) -> Process:
                for z, a in reversed(annots):
                    q = ClientDispose(z, a, q)
                return q

            return _Move(Tau, lambda h: b(Hooks(out=disposes)), m.rules + ("BangWeaken",))
        case SpawnReqL(c, c2, _):
            smap = m.spawn_map
            assert smap is not None
            server = i.subject
            fn_body = free_names(p.body)
            pairs = [(z, z2) for z, z2 in sorted(smap.items()) if z != server]
            if any(z not in fn_body for z, _ in pairs):
                # a context name of the server is bound between it and this cut
                return None
            ix, iy = _oriented(p, c, c2, i.obj)

            def spawned(h: Hooks) -> Process:
                q: Process = res(Res(ix, iy, b(_ID)))
                for z, z2 in reversed(pairs):
                    q = ClientSpawn(z, z2, q)
                return q

            return _Move(Tau, spawned, m.rules + ("BangContract",), smap)
    raise AssertionError(f"unexpected sync label {lab}")


# -- public API -----------------------------------------------------------------


def _prepare(s: State) -> tuple[Derivation, frozenset[Name]]:
    q = uniquify(s.process)
    d = s.derivation if q is s.process else infer(q)
    return d, all_names(q)


def _finish(s: State, m: _Move, hooks: Hooks = _ID, label: Label | None = None) -> Transition:
    target = m.build(hooks)
    try:
        td = infer(target)
    except TypingError as e:
        raise InternalInvariantViolation(
            f"target of {label or m.label} from {s.process} does not type: {target}: {e}") from e
    smap = tuple(sorted(m.spawn_map.items())) if m.spawn_map else None
    return Transition(s, label or m.label, State(td), smap, m.rules)


def transitions(s: State) -> list[Transition]:
    """Every transition of ``s`` except standalone type receives."""
    d, avoid = _prepare(s)
    return [_finish(s, m) for m in _moves(d, avoid) if not m.pending]


def moves_and_pending(s: State) -> tuple[list[Transition], list[Name]]:
    """:func:`transitions` and :func:`pending_receives` from one traversal."""
    d, avoid = _prepare(s)
    ms = _moves(d, avoid)
    return ([_finish(s, m) for m in ms if not m.pending],
            [m.label.subject for m in ms if m.pending])


def expand(s: State) -> tuple[list[tuple[Label, Process]], bool]:
    """Untyped successor processes plus whether a type receive is pending.

    Cheaper than :func:`transitions` when most targets are already known;
    pass the new ones to :func:`typed_target`.
    """
    d, avoid = _prepare(s)
    ms = _moves(d, avoid)
    return [(m.label, m.build(_ID)) for m in ms if not m.pending], any(m.pending for m in ms)


def typed_target(s: State, label: Label, target: Process) -> State:
    try:
        return State(infer(target))
    except TypingError as e:
        raise InternalInvariantViolation(
            f"target of {label} from {s.process} does not type: {target}: {e}") from e


def pending_receives(s: State) -> list[Name]:
    """Subjects of top-level type receives waiting for a witness."""
    d, avoid = _prepare(s)
    return [m.label.subject for m in _moves(d, avoid) if m.pending]


def recv_type_step(s: State, x: Name, witness: Prop) -> Transition:
    d, avoid = _prepare(s)
    for m in _moves(d, avoid):
        if m.pending and m.label.subject == x:
            return _finish(s, m, Hooks(witness=witness), RecvTypeL(x, witness))
    raise NoSuchTransition(RecvTypeL(x, witness), [str(t.label) for t in transitions(s)])


def step(s: State, label: Label) -> State:
    """Fire the first transition whose label matches ``label`` up to bound names."""
    if isinstance(label, RecvTypeL):
        return recv_type_step(s, label.subject, label.a).target
    ts = transitions(s)
    want = label_key(label)
    for t in ts:
        if label_key(t.label) == want:
            return t.target
    raise NoSuchTransition(label, [str(t.label) for t in ts])


def _exposed(p: Process) -> bool:
    # a prefix reached through parallel composition alone can always fire:
    # Par1/Par2 only need the bound name to be fresh, which uniquify ensures
    if isinstance(p, Par):
        return _exposed(p.left) or _exposed(p.right)
    return not isinstance(p, (Res, Nil))


def enabled(s: State) -> bool:
    """Whether some transition (possibly a type receive) is available."""
    if _exposed(s.process):
        return True
    d, avoid = _prepare(s)
    return bool(_moves(d, avoid))


__all__ = ["Hooks", "InternalInvariantViolation", "NoSuchTransition", "State", "Transition",
           "enabled", "expand", "moves_and_pending", "pending_receives", "recv_type_step", "step", "transitions", "typed_target"]
