"""Bounded saturation of the typing rules over name-free judgements.

A judgement is a hypersequent with its channel names erased: a sorted tuple of
non-empty sequents, each a sorted tuple of propositions.  Names carry no
information for provability (every rule only asks for fresh or matching names),
so erasing them loses nothing and keeps the saturation finite.

Bounds, fixed so that runs are reproducible:

* atom pool ``{X}``, quantifiers bind ``X`` only;
* base types ``1``, ``bot``, ``X`` and ``~X`` (the units of the additives have
  no introduction rule besides the axiom, so they are left out);
* proposition depth at most 2;
* at most 4 entries (names) per judgement.

``enumerate(k)`` holds every judgement with a derivation of height at most
``k`` inside these bounds; leaves have height 0.
"""
from __future__ import annotations

import itertools
from builtins import enumerate as _enumerate
from dataclasses import dataclass
from functools import lru_cache

from .names import name
from .types import (BOT, ONE, Atom, DualAtom, Exists, Forall, Hypersequent, OfCourse, Parr, Plus,
                    Prop, Tensor, WhyNot, With, depth, dual, ftv, prop_key, subst)

MAX_DEPTH = 2
MAX_NAMES = 4
VAR = name("X")

BOUNDS = {"atoms": ["X"], "base": ["1", "bot", "X", "~X"], "max_prop_depth": MAX_DEPTH,
          "max_names": MAX_NAMES}

Seq = tuple[tuple, ...]       # sorted prop keys
Judgement = tuple[Seq, ...]   # sorted non-empty sequents


@lru_cache(maxsize=None)
def _universe() -> tuple[dict[tuple, Prop], tuple[tuple, ...]]:
    base = [ONE, BOT, Atom(VAR), DualAtom(VAR)]
    props = list(base)
    for c in (Tensor, Parr, Plus, With):
        props += [c(a, b) for a in base for b in base]
    props += [c(a) for c in (OfCourse, WhyNot) for a in base]
    props += [c(VAR, a) for c in (Exists, Forall) for a in base]
    table = {prop_key(a): a for a in props}
    return table, tuple(sorted(table))


@lru_cache(maxsize=None)
def _tables() -> dict[str, dict]:
    """Connective results inside the bounds, keyed by the argument keys."""
    keys = _universe()[1]
    t: dict[str, dict] = {"tensor": {}, "parr": {}, "with": {}, "plus": {}, "dual": {},
                          "forall": {}, "quest": {}, "bang": {}}
    for a in keys:
        pa = _prop(a)
        t["dual"][a] = _key(dual(pa))
        t["forall"][a] = _key(Forall(VAR, pa))
        t["quest"][a] = _key(WhyNot(pa))
        t["bang"][a] = _key(OfCourse(pa))
        t["plus"][a] = tuple(sorted({k for q in keys for k in (_key(Plus(pa, _prop(q))),
                                                               _key(Plus(_prop(q), pa))) if k}))
        for b in keys:
            pb = _prop(b)
            for name_, c in (("tensor", Tensor), ("parr", Parr), ("with", With)):
                k = _key(c(pa, pb))
                if k is not None:
                    t[name_][a, b] = k
    return t


def _prop(k: tuple) -> Prop:
    return _universe()[0][k]


def _key(a: Prop) -> tuple | None:
    """Key of ``a`` if it lies inside the bounds, else None."""
    if depth(a) > MAX_DEPTH:
        return None
    k = prop_key(a)
    return k if k in _universe()[0] else None


def _seq(entries) -> Seq:
    return tuple(sorted(entries))


def _judgement(seqs) -> Judgement | None:
    out = tuple(sorted(s for s in seqs if s))
    return out if sum(map(len, out)) <= MAX_NAMES else None


def _size(j: Judgement) -> int:
    return sum(map(len, j))


def _drop(s: Seq, i: int) -> Seq:
    return s[:i] + s[i + 1:]


# -- rules --------------------------------------------------------------------------


def _leaves() -> set[Judgement]:
    out: set[Judgement] = {(), ((prop_key(ONE),),)}
    for k in _universe()[1]:
        a = _prop(k)
        dk = _key(dual(a))
        if dk is not None:
            out.add((_seq((dk, k)),))
    return out


def _unary(j: Judgement) -> set[Judgement]:
    """Rules with one premise."""
    out: set[Judgement] = set()
    n = _size(j)
    tab = _tables()
    add = lambda *seqs: out.add(_judgement(seqs))  # noqa: E731
    # contraction needs only the two entries to share a sequent
    for si, s in _enumerate(j):
        rest = j[:si] + j[si + 1:]
        for i in range(len(s) - 1):
            if s[i] == s[i + 1] and s[i][0] == "WhyNot":
                add(*rest, _drop(s, i))
    if len(j) == 2:
        s1, s2 = j
        for (i, a), (l, b) in itertools.product(_enumerate(s1), _enumerate(s2)):
            rest = _drop(s1, i) + _drop(s2, l)
            for xy in ((a, b), (b, a)):
                k = tab["tensor"].get(xy)
                if k is not None:
                    add(_seq(rest + (k,)))
    if len(j) > 1:
        return out - {None}
    s = j[0] if j else ()
    if n < MAX_NAMES:
        add(_seq(s + (prop_key(BOT),)))
        for k in _universe()[1]:
            if k[0] == "WhyNot":
                add(_seq(s + (k,)))
    for i, a in _enumerate(s):
        rest = _drop(s, i)
        # Parr: an ordered pair of entries becomes one
        for l, b in _enumerate(rest):
            k = tab["parr"].get((a, b))
            if k is not None:
                add(_seq(_drop(rest, l) + (k,)))
        for k in tab["plus"][a]:
            add(_seq(rest + (k,)))
        for k in _exists_over(a):
            add(_seq(rest + (k,)))
        k = tab["forall"][a]
        if k is not None and not any(_has_var(b) for b in rest):
            add(_seq(rest + (k,)))
        k = tab["quest"][a]
        if k is not None:
            add(_seq(rest + (k,)))
            if all(b[0] == "WhyNot" for b in rest):
                add(_seq(rest + (tab["bang"][a],)))
    return out - {None}


@lru_cache(maxsize=None)
def _has_var(k: tuple) -> bool:
    return VAR in ftv(_prop(k))


@lru_cache(maxsize=None)
def _exists_over(c: tuple) -> tuple[tuple, ...]:
    """Keys of every bounded Exists X.B such that B{A/X} = c for some bounded A."""
    out = []
    for k in _universe()[1]:
        e = _prop(k)
        if not isinstance(e, Exists):
            continue
        if any(prop_key(subst(e.body, _prop(w), e.var)) == c for w in _universe()[1]):
            out.append(k)
    return tuple(out)


def _cuts(j: Judgement) -> set[Judgement]:
    out: set[Judgement] = set()
    for (si, s), (ti, t) in itertools.permutations(_enumerate(j), 2):
        for i, a in _enumerate(s):
            da = _tables()["dual"][a]
            if da is None:
                continue
            for l, b in _enumerate(t):
                if b == da:
                    rest = [u for m, u in _enumerate(j) if m not in (si, ti)]
                    out.add(_judgement(rest + [_seq(_drop(s, i) + _drop(t, l))]))
    return out - {None}


def _withs(level: set[Judgement]) -> set[Judgement]:
    """Rule With: two single-sequent premises sharing the context."""
    by_ctx: dict[Seq, set[tuple]] = {}
    for j in level:
        if len(j) != 1:
            continue
        s = j[0]
        for i, a in _enumerate(s):
            by_ctx.setdefault(_drop(s, i), set()).add(a)
    out: set[Judgement] = set()
    for ctx, heads in by_ctx.items():
        for a, b in itertools.product(sorted(heads), repeat=2):
            k = _tables()["with"].get((a, b))
            if k is not None:
                out.add((_seq(ctx + (k,)),))
    return out


def _mixes(new: set[Judgement], level: set[Judgement]) -> set[Judgement]:
    """Rule Mix over pairs with at least one premise from ``new``."""
    def by_size(js):
        out: dict[int, list[Judgement]] = {}
        for j in js:
            if j:
                out.setdefault(_size(j), []).append(j)
        return out

    fresh, every = by_size(new), by_size(level)
    out: set[Judgement] = set()
    for n, left in fresh.items():
        for m, right in every.items():
            if n + m <= MAX_NAMES:
                for a in left:
                    for b in right:
                        out.add(tuple(sorted(a + b)))
    return out


# -- public -----------------------------------------------------------------------


@lru_cache(maxsize=None)
def _level(k: int) -> tuple[frozenset[Judgement], frozenset[Judgement]]:
    """Judgements of height at most ``k`` and the subset first reached at ``k``.

    Single-premise rules only need the judgements new at ``k - 1``: the others
    already had their consequences added one level earlier.
    """
    if k <= 0:
        leaves = frozenset(_leaves())
        return leaves, leaves
    prev, recent = _level(k - 1)
    found: set[Judgement] = set()
    for j in recent:
        found |= _unary(j)
        found |= _cuts(j)
    found |= _withs(set(prev))
    found |= _mixes(set(recent), set(prev))
    return prev | found, frozenset(found - prev)


def enumerate(k: int) -> frozenset[Judgement]:  # noqa: A001 - mirrors the documented name
    """Every bounded name-free judgement with a derivation of height at most ``k``."""
    if k < 0:
        raise ValueError("height bound must be non-negative")
    return _level(k)[0]


def erase(h: Hypersequent) -> Judgement:
    """Forget the channel names of a hypersequent."""
    return tuple(sorted(_seq(prop_key(a) for _, a in s) for s in h.sequents if s.entries))


def contains(judgements: frozenset[Judgement], h: Hypersequent) -> bool:
    return erase(h) in judgements


def show_judgement(j: Judgement) -> str:
    from .parser import show_prop
    parts = [", ".join(show_prop(_prop(k)) for k in s) for s in j]
    return "|- " + (" || ".join(parts) if parts else "(empty)")


@dataclass(frozen=True)
class IndependenceViolation:
    judgement: Judgement
    sequent: Seq

    def __str__(self) -> str:
        return f"{show_judgement(self.judgement)} is derivable but {show_judgement((self.sequent,))} is not"


def check_independence(k: int) -> list[IndependenceViolation]:
    """Every sequent of a derivable hypersequent is itself derivable (same height bound)."""
    level = enumerate(k)
    bad = [(j, s) for j in level for s in j if (s,) not in level]
    return [IndependenceViolation(j, s) for j, s in sorted(bad)]


__all__ = ["BOUNDS", "IndependenceViolation", "Judgement", "MAX_DEPTH", "MAX_NAMES", "check_independence",
           "contains", "enumerate", "erase", "show_judgement"]
