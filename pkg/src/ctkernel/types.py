"""Propositions of classical linear logic, sequents and hypersequents."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Union

from .names import Name, cache_hash, fresh


class Prop:
    """Base class of propositions (channel types)."""

    __slots__ = ()

    def __str__(self) -> str:
        from .parser import show_prop

        return show_prop(self)

    def __repr__(self) -> str:
        return f"<{self}>"


@dataclass(frozen=True, repr=False)
class Tensor(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, repr=False)
class Parr(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, repr=False)
class Plus(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, repr=False)
class With(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, repr=False)
class One(Prop):
    pass


@dataclass(frozen=True, repr=False)
class Bot(Prop):
    pass


@dataclass(frozen=True, repr=False)
class Zero(Prop):
    pass


@dataclass(frozen=True, repr=False)
class Top(Prop):
    pass


@dataclass(frozen=True, repr=False)
class OfCourse(Prop):
    body: Prop


@dataclass(frozen=True, repr=False)
class WhyNot(Prop):
    body: Prop


@dataclass(frozen=True, repr=False)
class Exists(Prop):
    var: Name
    body: Prop


@dataclass(frozen=True, repr=False)
class Forall(Prop):
    var: Name
    body: Prop


@dataclass(frozen=True, repr=False)
class Atom(Prop):
    var: Name


@dataclass(frozen=True, repr=False)
class DualAtom(Prop):
    var: Name


for _cls in (Tensor, Parr, Plus, With, One, Bot, Zero, Top, OfCourse, WhyNot, Exists, Forall, Atom,
             DualAtom):
    cache_hash(_cls)

ONE, BOT, ZERO, TOP = One(), Bot(), Zero(), Top()

BINARY = (Tensor, Parr, Plus, With)
_DUAL_BIN = {Tensor: Parr, Parr: Tensor, Plus: With, With: Plus}
_DUAL_UNIT = {One: BOT, Bot: ONE, Zero: TOP, Top: ZERO}


@lru_cache(maxsize=200_000)
def dual(a: Prop) -> Prop:
    match a:
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return _DUAL_BIN[type(a)](dual(l), dual(r))
        case One() | Bot() | Zero() | Top():
            return _DUAL_UNIT[type(a)]
        case OfCourse(b):
            return WhyNot(dual(b))
        case WhyNot(b):
            return OfCourse(dual(b))
        case Exists(v, b):
            return Forall(v, dual(b))
        case Forall(v, b):
            return Exists(v, dual(b))
        case Atom(v):
            return DualAtom(v)
        case DualAtom(v):
            return Atom(v)
    raise TypeError(f"not a proposition: {a!r}")


@lru_cache(maxsize=200_000)
def ftv(a: Prop) -> frozenset[Name]:
    """Free type variables."""
    match a:
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return ftv(l) | ftv(r)
        case OfCourse(b) | WhyNot(b):
            return ftv(b)
        case Exists(v, b) | Forall(v, b):
            return ftv(b) - {v}
        case Atom(v) | DualAtom(v):
            return frozenset((v,))
    return frozenset()


def all_tvars(a: Prop) -> set[Name]:
    match a:
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return all_tvars(l) | all_tvars(r)
        case OfCourse(b) | WhyNot(b):
            return all_tvars(b)
        case Exists(v, b) | Forall(v, b):
            return all_tvars(b) | {v}
        case Atom(v) | DualAtom(v):
            return {v}
    return set()


def subst(body: Prop, witness: Prop, var: Name) -> Prop:
    """Capture-avoiding ``body{witness/var}``; ``~var`` becomes ``dual(witness)``."""
    return subst_many(body, {var: witness})


def subst_many(body: Prop, sub: Mapping[Name, Prop]) -> Prop:
    if not sub:
        return body
    match body:
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return type(body)(subst_many(l, sub), subst_many(r, sub))
        case OfCourse(b) | WhyNot(b):
            return type(body)(subst_many(b, sub))
        case Exists(v, b) | Forall(v, b):
            inner = {k: w for k, w in sub.items() if k != v}
            if not inner:
                return body
            danger = set().union(*(ftv(w) for w in inner.values()))
            if v in danger:
                v2 = fresh(v, danger | all_tvars(b) | set(inner))
                b = subst_many(b, {v: Atom(v2)})
                v = v2
            return type(body)(v, subst_many(b, inner))
        case Atom(v):
            return sub.get(v, body)
        case DualAtom(v):
            return dual(sub[v]) if v in sub else body
    return body


@lru_cache(maxsize=200_000)
def prop_key(a: Prop, env: tuple = ()) -> tuple:
    """Canonical nameless form; equal keys iff α-equivalent."""
    match a:
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return (type(a).__name__, prop_key(l, env), prop_key(r, env))
        case OfCourse(b) | WhyNot(b):
            return (type(a).__name__, prop_key(b, env))
        case Exists(v, b) | Forall(v, b):
            return (type(a).__name__, prop_key(b, (v,) + env))
        case Atom(v) | DualAtom(v):
            tag = type(a).__name__
            if v in env:
                return (tag, "#", env.index(v))
            return (tag, v.base, v.primes)
    return (type(a).__name__,)


def prop_eq(a: Prop, b: Prop) -> bool:
    return a is b or prop_key(a) == prop_key(b)


def depth(a: Prop) -> int:
    """Units and atoms have depth 1; each connective adds one."""
    match a:
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return 1 + max(depth(l), depth(r))
        case OfCourse(b) | WhyNot(b) | Exists(_, b) | Forall(_, b):
            return 1 + depth(b)
    return 1


# -- sequents -------------------------------------------------------------


class NameClash(Exception):
    def __init__(self, name: Name, detail: str = "") -> None:
        super().__init__(f"name clash on {name}" + (f": {detail}" if detail else ""))
        self.name = name


@dataclass(frozen=True)
class Sequent:
    """Finite map from channel names to propositions (entries sorted by name)."""

    entries: tuple[tuple[Name, Prop], ...] = ()

    @staticmethod
    def of(items: Mapping[Name, Prop] | Iterable[tuple[Name, Prop]]) -> Sequent:
        pairs = list(items.items() if isinstance(items, Mapping) else items)
        seen: set[Name] = set()
        for n, _ in pairs:
            if n in seen:
                raise NameClash(n, "duplicate entry in sequent")
            seen.add(n)
        return Sequent(tuple(sorted(pairs, key=lambda e: e[0])))

    @cached_property
    def _names(self) -> frozenset[Name]:
        return frozenset(n for n, _ in self.entries)

    def names(self) -> frozenset[Name]:
        return self._names

    def __contains__(self, n: object) -> bool:
        return n in self._names

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[Name, Prop]]:
        return iter(self.entries)

    def get(self, n: Name) -> Prop | None:
        for m, a in self.entries:
            if m == n:
                return a
        return None

    def without(self, *ns: Name) -> Sequent:
        return Sequent(tuple(e for e in self.entries if e[0] not in ns))

    def add(self, n: Name, a: Prop) -> Sequent:
        if n in self:
            raise NameClash(n)
        return Sequent.of(self.entries + ((n, a),))

    def union(self, other: Sequent) -> Sequent:
        return Sequent.of(self.entries + other.entries)

    def key(self) -> tuple:
        return tuple((n, prop_key(a)) for n, a in self.entries)

    def __str__(self) -> str:
        return ", ".join(f"{n}:{a}" for n, a in self.entries)


def is_client_context(s: Sequent) -> bool:
    return all(isinstance(a, WhyNot) for _, a in s.entries)


@dataclass(frozen=True)
class Hypersequent:
    """Multiset of sequents with pairwise-disjoint names; empty sequents dropped."""

    sequents: tuple[Sequent, ...] = ()

    @staticmethod
    def of(seqs: Iterable[Sequent | Mapping[Name, Prop]]) -> Hypersequent:
        out: list[Sequent] = []
        seen: set[Name] = set()
        for s in seqs:
            if not isinstance(s, Sequent):
                s = Sequent.of(s)
            if not s.entries:
                continue
            clash = seen & s.names()
            if clash:
                raise NameClash(min(clash), "names shared between sequents")
            seen |= s.names()
            out.append(s)
        out.sort(key=lambda s: s.entries[0][0])
        return Hypersequent(tuple(out))

    @cached_property
    def _names(self) -> frozenset[Name]:
        return frozenset().union(*(s.names() for s in self.sequents))

    def names(self) -> frozenset[Name]:
        return self._names

    def __len__(self) -> int:
        return len(self.sequents)

    def __iter__(self) -> Iterator[Sequent]:
        return iter(self.sequents)

    def find(self, n: Name) -> int | None:
        for i, s in enumerate(self.sequents):
            if n in s:
                return i
        return None

    def lookup(self, n: Name) -> Prop | None:
        i = self.find(n)
        return None if i is None else self.sequents[i].get(n)

    def key(self) -> tuple:
        return tuple(sorted(s.key() for s in self.sequents))

    def __str__(self) -> str:
        if not self.sequents:
            return "."
        return " || ".join(str(s) for s in self.sequents)


EMPTY = Hypersequent()

SequentLike = Union[Sequent, Mapping[Name, Prop]]


def hs_merge(g: Hypersequent, h: Hypersequent) -> Hypersequent:
    clash = g.names() & h.names()
    if clash:
        raise NameClash(min(clash), "hypersequents are not disjoint")
    return Hypersequent.of(g.sequents + h.sequents)


def hs_equal(g: Hypersequent, h: Hypersequent) -> bool:
    return g.key() == h.key()
