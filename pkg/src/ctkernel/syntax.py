"""Process terms, binding structure, renaming and α-equivalence."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .names import Name, cache_hash, fresh
from .types import Atom, Prop, all_tvars, ftv, prop_key, subst_many


class Process:
    __slots__ = ()

    def __str__(self) -> str:
        from .parser import show

        return show(self)

    def __repr__(self) -> str:
        return f"<{self}>"


@dataclass(frozen=True, repr=False)
class Send(Process):
    subject: Name
    obj: Name
    cont: Process


@dataclass(frozen=True, repr=False)
class Recv(Process):
    subject: Name
    obj: Name
    cont: Process


@dataclass(frozen=True, repr=False)
class InL(Process):
    subject: Name
    right: Prop
    cont: Process


@dataclass(frozen=True, repr=False)
class InR(Process):
    subject: Name
    left: Prop
    cont: Process


@dataclass(frozen=True, repr=False)
class Case(Process):
    subject: Name
    left: Process
    right: Process


@dataclass(frozen=True, repr=False)
class SendType(Process):
    subject: Name
    witness: Prop
    var: Name
    body: Prop
    cont: Process


@dataclass(frozen=True, repr=False)
class RecvType(Process):
    subject: Name
    var: Name
    cont: Process


@dataclass(frozen=True, repr=False)
class Close(Process):
    subject: Name


@dataclass(frozen=True, repr=False)
class Wait(Process):
    subject: Name
    cont: Process


@dataclass(frozen=True, repr=False)
class Link(Process):
    annot: Prop
    src: Name
    dst: Name


@dataclass(frozen=True, repr=False)
class Server(Process):
    subject: Name
    obj: Name
    body: Process


@dataclass(frozen=True, repr=False)
class ClientUse(Process):
    subject: Name
    obj: Name
    cont: Process


@dataclass(frozen=True, repr=False)
class ClientSpawn(Process):
    subject: Name
    copy: Name
    cont: Process


@dataclass(frozen=True, repr=False)
class ClientDispose(Process):
    subject: Name
    annot: Prop
    cont: Process


@dataclass(frozen=True, repr=False)
class Res(Process):
    left: Name
    right: Name
    body: Process


@dataclass(frozen=True, repr=False)
class Par(Process):
    left: Process
    right: Process


@dataclass(frozen=True, repr=False)
class Nil(Process):
    pass


for _cls in (Send, Recv, InL, InR, Case, SendType, RecvType, Close, Wait, Link, Server, ClientUse,
             ClientSpawn, ClientDispose, Res, Par, Nil):
    cache_hash(_cls)

NIL = Nil()



def children(p: Process) -> tuple[Process, ...]:
    match p:
        case Case(_, l, r) | Par(l, r):
            return (l, r)
        case Close() | Link() | Nil():
            return ()
        case Server(_, _, b) | Res(_, _, b):
            return (b,)
    return (p.cont,)  # type: ignore[attr-defined]


@lru_cache(maxsize=100_000)
def free_names(p: Process) -> frozenset[Name]:
    match p:
        case Nil():
            return frozenset()
        case Close(x):
            return frozenset((x,))
        case Link(_, x, y):
            return frozenset((x, y))
        case Send(x, y, q) | Recv(x, y, q) | Server(x, y, q) | ClientUse(x, y, q) | ClientSpawn(x, y, q):
            return (free_names(q) - {y}) | {x}
        case Res(x, y, q):
            return free_names(q) - {x, y}
        case Par(l, r):
            return free_names(l) | free_names(r)
        case Case(x, l, r):
            return free_names(l) | free_names(r) | {x}
    return free_names(p.cont) | {p.subject}  # type: ignore[attr-defined]


@lru_cache(maxsize=100_000)
def all_names(p: Process) -> frozenset[Name]:
    """Every channel name occurring in ``p``, free or bound."""
    out = set(free_names(p))
    match p:
        case Send(_, y, _) | Recv(_, y, _) | Server(_, y, _) | ClientUse(_, y, _) | ClientSpawn(_, y, _):
            out.add(y)
        case Res(x, y, _):
            out |= {x, y}
    for c in children(p):
        out |= all_names(c)
    return frozenset(out)


def is_terminated(p: Process) -> bool:
    match p:
        case Nil():
            return True
        case Par(l, r):
            return is_terminated(l) and is_terminated(r)
    return False


# -- renaming -------------------------------------------------------------


def rename(p: Process, mapping: Mapping[Name, Name]) -> Process:
    """Replace free names per ``mapping``, α-renaming binders to avoid capture."""
    fv = free_names(p)
    m = {k: v for k, v in mapping.items() if k in fv and k != v}
    if not m:
        return p
    return _rename(p, m)


def _bind(y: Name, body: Process, m: dict[Name, Name]) -> tuple[Name, dict[Name, Name]]:
    """Rename map to apply under binder ``y``; freshens ``y`` if it collides with
    an image of the map."""
    inner = {k: v for k, v in m.items() if k != y}
    targets = set(inner.values())
    if y in targets:
        y2 = fresh(y, targets | all_names(body) | set(inner) | set(inner.values()))
        inner[y] = y2
        return y2, inner
    return y, inner


def _rename(p: Process, m: dict[Name, Name]) -> Process:
    if not m or not (free_names(p) & m.keys()):
        return p
    r = lambda n: m.get(n, n)  # noqa: E731
    match p:
        case Close(x):
            return Close(r(x))
        case Link(a, x, y):
            return Link(a, r(x), r(y))
        case Send(x, y, q) | Recv(x, y, q) | Server(x, y, q) | ClientUse(x, y, q) | ClientSpawn(x, y, q):
            y2, inner = _bind(y, q, m)
            return type(p)(r(x), y2, _rename(q, inner))
        case Res(x, y, q):
            inner = {k: v for k, v in m.items() if k not in (x, y)}
            targets = set(inner.values())
            avoid = targets | all_names(q) | set(inner) | set(inner.values()) | {x, y}
            binders = []
            for b in (x, y):
                if b in targets:
                    b2 = fresh(b, avoid)
                    avoid.add(b2)
                    inner[b] = b2
                    binders.append(b2)
                else:
                    binders.append(b)
            return Res(binders[0], binders[1], _rename(q, inner))
        case Par(l, q):
            return Par(_rename(l, m), _rename(q, m))
        case Case(x, l, q):
            return Case(r(x), _rename(l, m), _rename(q, m))
        case InL(x, a, q) | InR(x, a, q) | ClientDispose(x, a, q):
            return type(p)(r(x), a, _rename(q, m))
        case SendType(x, w, v, b, q):
            return SendType(r(x), w, v, b, _rename(q, m))
        case RecvType(x, v, q):
            return RecvType(r(x), v, _rename(q, m))
        case Wait(x, q):
            return Wait(r(x), _rename(q, m))
    raise TypeError(f"unknown process {p!r}")


def prime_copy(p: Process) -> tuple[Process, dict[Name, Name]]:
    """Homomorphic copy adding one prime to every free name."""
    mapping = {z: z.primed() for z in sorted(free_names(p))}
    return rename(p, mapping), mapping


# -- type substitution inside processes ------------------------------------


def subst_type(p: Process, sub: Mapping[Name, Prop]) -> Process:
    """Substitute type variables in every annotation of ``p``."""
    if not sub:
        return p
    s = lambda a: subst_many(a, sub)  # noqa: E731
    match p:
        case Nil() | Close():
            return p
        case Link(a, x, y):
            return Link(s(a), x, y)
        case InL(x, a, q) | InR(x, a, q) | ClientDispose(x, a, q):
            return type(p)(x, s(a), subst_type(q, sub))
        case SendType(x, w, v, b, q):
            inner = {k: t for k, t in sub.items() if k != v}
            danger = set().union(*(ftv(t) for t in inner.values())) if inner else set()
            if v in danger:
                v2 = _fresh_tv(v, danger | all_tvars(b) | set(inner))
                b = subst_many(b, {v: Atom(v2)})
                v = v2
            return SendType(x, s(w), v, subst_many(b, inner), subst_type(q, sub))
        case RecvType(x, v, q):
            inner = {k: t for k, t in sub.items() if k != v}
            danger = set().union(*(ftv(t) for t in inner.values())) if inner else set()
            if v in danger:
                v2 = _fresh_tv(v, danger | proc_tvars(q) | set(inner))
                q = subst_type(q, {v: Atom(v2)})
                v = v2
            return RecvType(x, v, subst_type(q, inner))
        case Send(x, y, q) | Recv(x, y, q) | Server(x, y, q) | ClientUse(x, y, q) | ClientSpawn(x, y, q):
            return type(p)(x, y, subst_type(q, sub))
        case Res(x, y, q):
            return Res(x, y, subst_type(q, sub))
        case Par(l, r):
            return Par(subst_type(l, sub), subst_type(r, sub))
        case Case(x, l, r):
            return Case(x, subst_type(l, sub), subst_type(r, sub))
        case Wait(x, q):
            return Wait(x, subst_type(q, sub))
    raise TypeError(f"unknown process {p!r}")


def _fresh_tv(v: Name, avoid: set[Name]) -> Name:
    return fresh(v, avoid)


def proc_tvars(p: Process) -> set[Name]:
    """All type variable names mentioned anywhere in ``p``."""
    out: set[Name] = set()
    match p:
        case Link(a, _, _) | InL(_, a, _) | InR(_, a, _) | ClientDispose(_, a, _):
            out |= all_tvars(a)
        case SendType(_, w, v, b, _):
            out |= all_tvars(w) | all_tvars(b) | {v}
        case RecvType(_, v, _):
            out.add(v)
    for c in children(p):
        out |= proc_tvars(c)
    return out


# -- α-equivalence ----------------------------------------------------------


@lru_cache(maxsize=100_000)
def canonical(p: Process) -> tuple:
    """Nameless form: bound channel names and bound type variables become levels."""
    return _canon(p, (), ())


def _cn(x: Name, env: tuple) -> tuple:
    for i in range(len(env) - 1, -1, -1):
        if env[i] == x:
            return ("#", i)
    return (x.base, x.primes)


@lru_cache(maxsize=400_000)
def _canon(p: Process, env: tuple, tenv: tuple) -> tuple:
    # memoized on the binder context too: successor states share most
    # subterms with their source under the same binders
    tag = type(p).__name__
    match p:
        case Nil():
            return (tag,)
        case Close(x):
            return (tag, _cn(x, env))
        case Link(a, x, y):
            return (tag, _tkey(a, tenv), _cn(x, env), _cn(y, env))
        case Send(x, y, q) | Recv(x, y, q) | Server(x, y, q) | ClientUse(x, y, q) | ClientSpawn(x, y, q):
            return (tag, _cn(x, env), _canon(q, env + (y,), tenv))
        case Res(x, y, q):
            return (tag, _canon(q, env + (x, y), tenv))
        case Par(l, r):
            return (tag, _canon(l, env, tenv), _canon(r, env, tenv))
        case Case(x, l, r):
            return (tag, _cn(x, env), _canon(l, env, tenv), _canon(r, env, tenv))
        case InL(x, a, q) | InR(x, a, q) | ClientDispose(x, a, q):
            return (tag, _cn(x, env), _tkey(a, tenv), _canon(q, env, tenv))
        case SendType(x, w, v, b, q):
            return (tag, _cn(x, env), _tkey(w, tenv), _tkey(b, (v,) + tenv), _canon(q, env, tenv))
        case RecvType(x, v, q):
            return (tag, _cn(x, env), _canon(q, env, (v,) + tenv))
        case Wait(x, q):
            return (tag, _cn(x, env), _canon(q, env, tenv))
    raise TypeError(f"unknown process {p!r}")


def _tkey(a: Prop, tenv: tuple) -> tuple:
    # prop_key numbers its own binders innermost-first; process-level type
    # binders are appended after them so indices stay consistent
    return prop_key(a, tenv)


def alpha_eq(p: Process, q: Process) -> bool:
    return p is q or canonical(p) == canonical(q)


# -- Barendregt convention -------------------------------------------------


def uniquify(p: Process, avoid: frozenset[Name] | set[Name] = frozenset()) -> Process:
    """α-rename binders so that every bound name is distinct from every other
    bound name and from all free names; already-distinct binders are kept."""
    seen = set(free_names(p)) | set(avoid)
    if _is_unique(p, set(seen)):
        return p
    return _uniq(p, seen)


def _is_unique(p: Process, seen: set[Name]) -> bool:
    match p:
        case Send(_, y, q) | Recv(_, y, q) | Server(_, y, q) | ClientUse(_, y, q) | ClientSpawn(_, y, q):
            if y in seen:
                return False
            seen.add(y)
            return _is_unique(q, seen)
        case Res(x, y, q):
            if x in seen or y in seen or x == y:
                return False
            seen |= {x, y}
            return _is_unique(q, seen)
    return all(_is_unique(c, seen) for c in children(p))


def _pick(y: Name, seen: set[Name]) -> Name:
    y2 = y if y not in seen else fresh(y, seen)
    seen.add(y2)
    return y2


def _uniq(p: Process, seen: set[Name]) -> Process:
    match p:
        case Send(x, y, q) | Recv(x, y, q) | Server(x, y, q) | ClientUse(x, y, q) | ClientSpawn(x, y, q):
            y2 = _pick(y, seen)
            q = _uniq(rename(q, {y: y2}) if y2 != y else q, seen)
            return type(p)(x, y2, q)
        case Res(x, y, q):
            x2 = _pick(x, seen)
            y2 = _pick(y, seen)
            q = _rename_simul(q, {x: x2, y: y2})
            return Res(x2, y2, _uniq(q, seen))
        case Par(l, r):
            return Par(_uniq(l, seen), _uniq(r, seen))
        case Case(x, l, r):
            return Case(x, _uniq(l, seen), _uniq(r, seen))
        case Nil() | Close() | Link():
            return p
        case InL(x, a, q) | InR(x, a, q) | ClientDispose(x, a, q):
            return type(p)(x, a, _uniq(q, seen))
        case SendType(x, w, v, b, q):
            return SendType(x, w, v, b, _uniq(q, seen))
        case RecvType(x, v, q):
            return RecvType(x, v, _uniq(q, seen))
        case Wait(x, q):
            return Wait(x, _uniq(q, seen))
    raise TypeError(f"unknown process {p!r}")


def _rename_simul(q: Process, m: dict[Name, Name]) -> Process:
    m = {k: v for k, v in m.items() if k != v}
    return rename(q, m) if m else q


def normalize(p: Process) -> Process:
    """Printable representative of the α-class of ``p``.

    Channel binders become ``b1, b2, ...`` in traversal order, skipping names
    that already occur in ``p``; type-variable binders are left alone.
    """
    used = all_names(p)
    counter = itertools.count(1)

    def pick() -> Name:
        while True:
            n = Name(f"b{next(counter)}")
            if n not in used:
                return n

    def go(p: Process) -> Process:
        match p:
            case Send(x, y, q) | Recv(x, y, q) | Server(x, y, q) | ClientUse(x, y, q) | ClientSpawn(x, y, q):
                y2 = pick()
                return type(p)(x, y2, go(rename(q, {y: y2})))
            case Res(x, y, q):
                x2, y2 = pick(), pick()
                return Res(x2, y2, go(rename(q, {x: x2, y: y2})))
            case Par(l, r):
                return Par(go(l), go(r))
            case Case(x, l, r):
                return Case(x, go(l), go(r))
            case InL(x, a, q) | InR(x, a, q) | ClientDispose(x, a, q):
                return type(p)(x, a, go(q))
            case SendType(x, w, v, b, q):
                return SendType(x, w, v, b, go(q))
            case RecvType(x, v, q):
                return RecvType(x, v, go(q))
            case Wait(x, q):
                return Wait(x, go(q))
        return p

    return go(p)
