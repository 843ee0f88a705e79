"""Bottom-up type synthesis producing explicit derivation trees.

Each process constructor selects exactly one rule, so synthesis is a single
structural pass.  Prefix rules expect their premise to be a single sequent;
ambient sequents reach the conclusion only through Mix and Cut.  Contraction
is the one exception: it locates ``x`` and ``x'`` by name and leaves any
other sequents untouched.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .names import Name
from .syntax import (Case, ClientDispose, ClientSpawn, ClientUse, Close, InL, InR, Link, Nil, Par,
                     Process, Recv, RecvType, Res, Send, SendType, Server, Wait)
from .types import (BOT, ONE, EMPTY, Bot, Exists, Forall, Hypersequent, NameClash, OfCourse, One,
                    Parr, Plus, Prop, Sequent, Tensor, WhyNot, With, dual, ftv, hs_equal, hs_merge,
                    is_client_context, prop_eq, subst)

RULES = ("Ax", "Cut", "Mix0", "Mix", "One", "Bot", "Tensor", "Parr", "Plus1", "Plus2", "With",
         "Exists", "Forall", "Bang", "Quest", "Weaken", "Contract")


@dataclass(frozen=True)
class Derivation:
    rule: str
    process: Process
    type: Hypersequent
    premises: tuple[Derivation, ...] = ()

    def size(self) -> int:
        return 1 + sum(d.size() for d in self.premises)

    def height(self) -> int:
        return 0 if not self.premises else 1 + max(d.height() for d in self.premises)

    def nodes(self):
        yield self
        for d in self.premises:
            yield from d.nodes()


Judgement = tuple  # (process, hypersequent)


class TypingError(Exception):
    """Base class; ``path`` lists child indices from the root to the failing subterm."""

    kind = "TypeError"

    def __init__(self, msg: str, path: tuple[int, ...] = (), **info) -> None:
        super().__init__(msg)
        self.msg = msg
        self.path = path
        self.info = info

    def at(self, i: int) -> TypingError:
        self.path = (i,) + self.path
        return self

    def __str__(self) -> str:
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.kind} at {where}: {self.msg}"


class NameClashError(TypingError):
    kind = "NameClash"


class NotDual(TypingError):
    kind = "NotDual"


class NotInDistinctSequents(TypingError):
    kind = "NotInDistinctSequents"


class BranchMismatch(TypingError):
    kind = "BranchMismatch"


class NonClientContext(TypingError):
    kind = "NonClientContext"


class AmbientContext(TypingError):
    kind = "AmbientContext"


class SubjectMissing(TypingError):
    kind = "SubjectMissing"


class TypeMismatch(TypingError):
    kind = "TypeMismatch"


class TypeVarEscape(TypingError):
    kind = "TypeVarEscape"


def _single(d: Derivation, rule: str) -> Sequent:
    """The premise viewed as one sequent (the empty hypersequent is one empty sequent)."""
    seqs = d.type.sequents
    if len(seqs) > 1:
        raise AmbientContext(f"rule {rule} needs a single-sequent premise, got {d.type}")
    return seqs[0] if seqs else Sequent()


def _conclude(rule: str, p: Process, seq: Sequent, *prem: Derivation) -> Derivation:
    return Derivation(rule, p, Hypersequent.of([seq]), prem)


def _entry(seq: Sequent, x: Name, rule: str) -> Prop:
    a = seq.get(x)
    if a is None:
        raise SubjectMissing(f"rule {rule}: {x} not in premise {seq}", name=x)
    return a


def _fresh_in(seq: Sequent, x: Name, rule: str) -> None:
    if x in seq:
        raise NameClashError(f"rule {rule}: {x} already used in {seq}", name=x)


def _infer(p: Process) -> Derivation:
    match p:
        case Nil():
            return Derivation("Mix0", p, EMPTY)
        case Close(x):
            return _conclude("One", p, Sequent.of({x: ONE}))
        case Link(a, x, y):
            if x == y:
                raise NameClashError(f"link endpoints coincide: {x}", name=x)
            return _conclude("Ax", p, Sequent.of({x: dual(a), y: a}))
        case Par(l, r):
            dl, dr = _sub(l, 0), _sub(r, 1)
            try:
                return Derivation("Mix", p, hs_merge(dl.type, dr.type), (dl, dr))
            except NameClash as e:
                raise NameClashError(str(e), name=e.name) from None
        case Res(x, y, q):
            d = _sub(q, 0)
            return _cut(p, x, y, d)
        case Wait(x, q):
            d = _sub(q, 0)
            seq = _single(d, "Bot")
            _fresh_in(seq, x, "Bot")
            return _conclude("Bot", p, seq.add(x, BOT), d)
        case Send(x, y, q):
            d = _sub(q, 0)
            seqs = d.type.sequents
            iy, ix = d.type.find(y), d.type.find(x)
            if iy is None or ix is None:
                raise SubjectMissing(f"rule Tensor: {y if iy is None else x} not in {d.type}",
                                     name=y if iy is None else x)
            if iy == ix:
                raise NotInDistinctSequents(f"rule Tensor: {y} and {x} share a sequent in {d.type}",
                                            x=y, y=x)
            if len(seqs) != 2:
                raise AmbientContext(f"rule Tensor needs exactly two sequents, got {d.type}")
            a, b = seqs[iy].get(y), seqs[ix].get(x)
            seq = seqs[iy].without(y).union(seqs[ix].without(x)).add(x, Tensor(a, b))
            return _conclude("Tensor", p, seq, d)
        case Recv(x, y, q):
            d = _sub(q, 0)
            seq = _single(d, "Parr")
            a, b = _entry(seq, y, "Parr"), _entry(seq, x, "Parr")
            return _conclude("Parr", p, seq.without(x, y).add(x, Parr(a, b)), d)
        case InL(x, b, q):
            d = _sub(q, 0)
            seq = _single(d, "Plus1")
            a = _entry(seq, x, "Plus1")
            return _conclude("Plus1", p, seq.without(x).add(x, Plus(a, b)), d)
        case InR(x, a, q):
            d = _sub(q, 0)
            seq = _single(d, "Plus2")
            b = _entry(seq, x, "Plus2")
            return _conclude("Plus2", p, seq.without(x).add(x, Plus(a, b)), d)
        case Case(x, l, r):
            dl, dr = _sub(l, 0), _sub(r, 1)
            sl, sr = _single(dl, "With"), _single(dr, "With")
            a, b = _entry(sl, x, "With"), _entry(sr, x, "With")
            gl, gr = sl.without(x), sr.without(x)
            if not hs_equal(Hypersequent.of([gl]), Hypersequent.of([gr])):
                raise BranchMismatch(f"case branches disagree: {gl} vs {gr}")
            return _conclude("With", p, gl.add(x, With(a, b)), dl, dr)
        case SendType(x, w, v, b, q):
            d = _sub(q, 0)
            seq = _single(d, "Exists")
            c = _entry(seq, x, "Exists")
            expected = subst(b, w, v)
            if not prop_eq(c, expected):
                raise TypeMismatch(f"rule Exists: {x}:{c} but scheme gives {expected}",
                                   expected=expected, actual=c)
            return _conclude("Exists", p, seq.without(x).add(x, Exists(v, b)), d)
        case RecvType(x, v, q):
            d = _sub(q, 0)
            seq = _single(d, "Forall")
            b = _entry(seq, x, "Forall")
            rest = seq.without(x)
            if any(v in ftv(a) for _, a in rest):
                raise TypeVarEscape(f"rule Forall: type variable {v} free in context {rest}")
            return _conclude("Forall", p, rest.add(x, Forall(v, b)), d)
        case Server(x, y, q):
            d = _sub(q, 0)
            seq = _single(d, "Bang")
            a = _entry(seq, y, "Bang")
            rest = seq.without(y)
            if not is_client_context(rest):
                raise NonClientContext(f"rule Bang: context {rest} is not all ?-typed")
            _fresh_in(rest, x, "Bang")
            return _conclude("Bang", p, rest.add(x, OfCourse(a)), d)
        case ClientUse(x, y, q):
            d = _sub(q, 0)
            seq = _single(d, "Quest")
            a = _entry(seq, y, "Quest")
            rest = seq.without(y)
            _fresh_in(rest, x, "Quest")
            return _conclude("Quest", p, rest.add(x, WhyNot(a)), d)
        case ClientDispose(x, a, q):
            d = _sub(q, 0)
            seq = _single(d, "Weaken")
            _fresh_in(seq, x, "Weaken")
            return _conclude("Weaken", p, seq.add(x, WhyNot(a)), d)
        case ClientSpawn(x, y, q):
            d = _sub(q, 0)
            ix, iy = d.type.find(x), d.type.find(y)
            if ix is None or iy is None:
                missing = x if ix is None else y
                raise SubjectMissing(f"rule Contract: {missing} not in {d.type}", name=missing)
            if ix != iy:
                raise AmbientContext(f"rule Contract: {x} and {y} in different sequents of {d.type}")
            seq = d.type.sequents[ix]
            a, b = seq.get(x), seq.get(y)
            if not isinstance(a, WhyNot) or not prop_eq(a, b):
                raise TypeMismatch(f"rule Contract: {x}:{a} and {y}:{b} must be the same ?-type",
                                   expected=a, actual=b)
            others = d.type.sequents[:ix] + d.type.sequents[ix + 1:]
            return Derivation("Contract", p, Hypersequent.of(others + (seq.without(y),)), (d,))
    raise TypeError(f"unknown process {p!r}")


infer = lru_cache(maxsize=200_000)(_infer)
infer.__doc__ = """Synthesize the derivation of ``p`` (memoized; derivations are immutable)."""


def _sub(q: Process, i: int) -> Derivation:
    try:
        return infer(q)
    except TypingError as e:
        raise e.at(i)


def _cut(p: Process, x: Name, y: Name, d: Derivation) -> Derivation:
    if x == y:
        raise NameClashError(f"restriction binds {x} twice", name=x)
    ix, iy = d.type.find(x), d.type.find(y)
    if ix is None or iy is None:
        missing = x if ix is None else y
        raise SubjectMissing(f"rule Cut: {missing} not in {d.type}", name=missing)
    if ix == iy:
        raise NotInDistinctSequents(f"rule Cut: {x} and {y} share a sequent in {d.type}", x=x, y=y)
    seqs = d.type.sequents
    a, b = seqs[ix].get(x), seqs[iy].get(y)
    if not prop_eq(b, dual(a)):
        raise NotDual(f"rule Cut: {x}:{a} and {y}:{b} are not dual", x=x, A=a, y=y, B=b)
    merged = seqs[ix].without(x).union(seqs[iy].without(y))
    others = tuple(s for i, s in enumerate(seqs) if i not in (ix, iy))
    return Derivation("Cut", p, Hypersequent.of(others + (merged,)), (d,))


def check(p: Process, g: Hypersequent) -> Derivation:
    d = infer(p)
    if not hs_equal(d.type, g):
        raise TypeMismatch(f"expected {g}, synthesized {d.type}", expected=g, actual=d.type)
    return d


# -- independent validation -------------------------------------------------

_RULE_OF = {Nil: "Mix0", Close: "One", Link: "Ax", Par: "Mix", Res: "Cut", Wait: "Bot",
            Send: "Tensor", Recv: "Parr", InL: "Plus1", InR: "Plus2", Case: "With",
            SendType: "Exists", RecvType: "Forall", Server: "Bang", ClientUse: "Quest",
            ClientDispose: "Weaken", ClientSpawn: "Contract"}


@dataclass
class Report:
    ok: bool = True
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate(d: Derivation) -> bool:
    return diagnose(d).ok


def diagnose(d: Derivation) -> Report:
    """Re-check every node against its rule schema, independently of :func:`infer`.

    The check is phrased as matching the conclusion against the premises'
    hypersequents (as multisets of name/type entries), not by re-running
    synthesis.
    """
    rep = Report()
    for node in d.nodes():
        msg = _check_node(node)
        if msg:
            rep.ok = False
            rep.problems.append(f"{node.rule} at {node.process}: {msg}")
    return rep


def _entries(h: Hypersequent) -> list[list[tuple]]:
    return sorted(sorted((n, _k(a)) for n, a in s) for s in h.sequents)


def _k(a: Prop) -> tuple:
    from .types import prop_key

    return prop_key(a)


def _seqs(*seqs) -> list[list[tuple]]:
    return sorted(sorted((n, _k(a)) for n, a in s) for s in seqs if s)


def _check_node(d: Derivation) -> str | None:
    p, rule = d.process, d.rule
    if _RULE_OF.get(type(p)) != rule:
        return f"rule {rule} does not match constructor {type(p).__name__}"
    prem = d.premises
    want_arity = {"Mix": 2, "With": 2, "Mix0": 0, "One": 0, "Ax": 0}.get(rule, 1)
    if len(prem) != want_arity:
        return f"expected {want_arity} premises, got {len(prem)}"
    kids = _children_of(p)
    for sub, q in zip(prem, kids):
        if sub.process != q:
            return "premise process does not match subterm"
    concl = _entries(d.type)
    # well-formedness of the conclusion itself
    names = [n for s in d.type.sequents for n, _ in s]
    if len(names) != len(set(names)):
        return "conclusion reuses a name"
    match p:
        case Nil():
            return None if concl == [] else "Mix0 concludes a nonempty hypersequent"
        case Close(x):
            return None if concl == _seqs([(x, ONE)]) else "bad One conclusion"
        case Link(a, x, y):
            return None if x != y and concl == _seqs([(x, dual(a)), (y, a)]) else "bad Ax conclusion"
        case Par():
            both = _entries(prem[0].type) + _entries(prem[1].type)
            if set(prem[0].type.names()) & set(prem[1].type.names()):
                return "Mix premises share names"
            return None if concl == sorted(both) else "Mix conclusion is not the union"
    h = prem[0].type
    seqs = [list(s) for s in h.sequents]

    def one() -> list | None:
        if len(seqs) > 1:
            return None
        return seqs[0] if seqs else []

    def find(n: Name) -> tuple[int, Prop] | None:
        for i, s in enumerate(seqs):
            for m, a in s:
                if m == n:
                    return i, a
        return None

    def drop(s: list, *ns: Name) -> list:
        return [(m, a) for m, a in s if m not in ns]

    match p:
        case Res(x, y, _):
            fx, fy = find(x), find(y)
            if not fx or not fy or fx[0] == fy[0] or _k(fy[1]) != _k(dual(fx[1])):
                return "bad Cut premise"
            merged = drop(seqs[fx[0]], x) + drop(seqs[fy[0]], y)
            rest = [s for i, s in enumerate(seqs) if i not in (fx[0], fy[0])]
            return None if concl == _seqs(merged, *rest) else "bad Cut conclusion"
        case Wait(x, _):
            s = one()
            if s is None or find(x):
                return "bad Bot premise"
            return None if concl == _seqs(s + [(x, BOT)]) else "bad Bot conclusion"
        case Send(x, y, _):
            fx, fy = find(x), find(y)
            if len(seqs) != 2 or not fx or not fy or fx[0] == fy[0]:
                return "bad Tensor premise"
            s = drop(seqs[fy[0]], y) + drop(seqs[fx[0]], x) + [(x, Tensor(fy[1], fx[1]))]
            return None if concl == _seqs(s) else "bad Tensor conclusion"
        case Recv(x, y, _):
            s = one()
            fx, fy = find(x), find(y)
            if s is None or not fx or not fy:
                return "bad Parr premise"
            return None if concl == _seqs(drop(s, x, y) + [(x, Parr(fy[1], fx[1]))]) else "bad Parr conclusion"
        case InL(x, b, _) | InR(x, b, _):
            s, fx = one(), find(x)
            if s is None or not fx:
                return "bad Plus premise"
            t = Plus(fx[1], b) if isinstance(p, InL) else Plus(b, fx[1])
            return None if concl == _seqs(drop(s, x) + [(x, t)]) else "bad Plus conclusion"
        case Case(x, _, _):
            h2 = prem[1].type
            if len(h) > 1 or len(h2) > 1:
                return "bad With premise"
            s1 = list(h.sequents[0]) if h.sequents else []
            s2 = list(h2.sequents[0]) if h2.sequents else []
            a = dict(s1).get(x)
            b = dict(s2).get(x)
            if a is None or b is None or _seqs(drop(s1, x)) != _seqs(drop(s2, x)):
                return "bad With premises"
            return None if concl == _seqs(drop(s1, x) + [(x, With(a, b))]) else "bad With conclusion"
        case SendType(x, w, v, b, _):
            s, fx = one(), find(x)
            if s is None or not fx or _k(fx[1]) != _k(subst(b, w, v)):
                return "bad Exists premise"
            return None if concl == _seqs(drop(s, x) + [(x, Exists(v, b))]) else "bad Exists conclusion"
        case RecvType(x, v, _):
            s, fx = one(), find(x)
            if s is None or not fx or any(v in ftv(a) for _, a in drop(s, x)):
                return "bad Forall premise"
            return None if concl == _seqs(drop(s, x) + [(x, Forall(v, fx[1]))]) else "bad Forall conclusion"
        case Server(x, y, _):
            s, fy = one(), find(y)
            if s is None or not fy or find(x) or not all(isinstance(a, WhyNot) for _, a in drop(s, y)):
                return "bad Bang premise"
            return None if concl == _seqs(drop(s, y) + [(x, OfCourse(fy[1]))]) else "bad Bang conclusion"
        case ClientUse(x, y, _):
            s, fy = one(), find(y)
            if s is None or not fy or find(x):
                return "bad Quest premise"
            return None if concl == _seqs(drop(s, y) + [(x, WhyNot(fy[1]))]) else "bad Quest conclusion"
        case ClientDispose(x, a, _):
            s = one()
            if s is None or find(x):
                return "bad Weaken premise"
            return None if concl == _seqs(s + [(x, WhyNot(a))]) else "bad Weaken conclusion"
        case ClientSpawn(x, y, _):
            fx, fy = find(x), find(y)
            if not fx or not fy or fx[0] != fy[0] or not isinstance(fx[1], WhyNot) or _k(fx[1]) != _k(fy[1]):
                return "bad Contract premise"
            rest = [s for i, s in enumerate(seqs) if i != fx[0]]
            return None if concl == _seqs(drop(seqs[fx[0]], y), *rest) else "bad Contract conclusion"
    return f"unknown rule {rule}"


def _children_of(p: Process) -> tuple[Process, ...]:
    from .syntax import children

    return children(p)
