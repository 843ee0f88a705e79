"""Random well-typed derivations, built bottom-up from a pool of judgements.

The generator seeds a pool with leaves and then repeatedly draws a rule by
weight, picks premises from the pool and applies the rule with fresh names.
Every candidate conclusion goes through :func:`~ctkernel.typecheck.infer`, so
a result is well-typed by construction; draws whose side conditions fail are
simply discarded.  Cuts look for a dual partner in three places in turn: a
second sequent of the same premise, another pool member, and a small
type-directed prover; an axiom is the last resort.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping

from .names import Name
from .syntax import (NIL, Case, ClientDispose, ClientSpawn, ClientUse, Close, InL, InR, Link, Par,
                     Process, Recv, RecvType, Res, Send, SendType, Server, Wait)
from .typecheck import Derivation, TypingError, infer
from .types import (BOT, ONE, Atom, Bot, DualAtom, Exists, Forall, OfCourse, One, Parr, Plus, Prop,
                    Tensor, WhyNot, With, depth, dual, ftv, prop_eq, subst)

DEFAULT_WEIGHTS: Mapping[str, float] = {
    "Ax": 1.0, "One": 1.0, "Mix0": 0.3, "Mix": 1.0, "Cut": 4.0, "Bot": 1.0, "Tensor": 1.2,
    "Parr": 1.0, "Plus1": 0.6, "Plus2": 0.6, "With": 0.6, "Exists": 0.6, "Forall": 0.6,
    "Bang": 1.5, "Quest": 1.0, "Weaken": 1.0, "Contract": 1.0,
}

MAX_PROP_DEPTH = 3
MAX_CLIENT_CONTEXT = 2


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 6  # nodes on the longest root-to-leaf path; 1 means a single leaf
    rule_weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    atom_pool: tuple[str, ...] = ("X",)
    steps: int = 20

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if not any(w > 0 for w in self.rule_weights.values()):
            raise ValueError("rule weights are all zero")
        if not self.atom_pool:
            raise ValueError("atom pool is empty")


class _Gen:
    def __init__(self, cfg: GenConfig) -> None:
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.counter = itertools.count(1)
        self.atoms = [Name(a) for a in cfg.atom_pool]
        rules = sorted(r for r, w in cfg.rule_weights.items() if w > 0)
        self.rules = rules
        self.weights = [cfg.rule_weights[r] for r in rules]

    # -- helpers --------------------------------------------------------------

    def name(self, base: str) -> Name:
        return Name(f"{base}{next(self.counter)}")

    def prop(self, d: int) -> Prop:
        r = self.rng
        if d <= 1 or r.random() < 0.35:
            k = r.randrange(4)
            v = r.choice(self.atoms)
            return (ONE, BOT, Atom(v), DualAtom(v))[k]
        k = r.randrange(8)
        if k < 4:
            cls = (Tensor, Parr, Plus, With)[k]
            return cls(self.prop(d - 1), self.prop(d - 1))
        if k < 6:
            return (OfCourse, WhyNot)[k - 4](self.prop(d - 1))
        v = r.choice(self.atoms)
        return (Exists, Forall)[k - 6](v, self.prop(d - 1))

    def ok(self, d: Derivation) -> bool:
        if d.height() + 1 > self.cfg.max_depth:
            return False
        return all(depth(a) <= MAX_PROP_DEPTH for s in d.type for _, a in s)

    def build(self, p: Process) -> Derivation | None:
        try:
            d = infer(p)
        except TypingError:
            return None
        return d if self.ok(d) else None

    def pick(self, pool: list[Derivation], pred) -> Derivation | None:
        cands = [d for d in pool if pred(d)]
        return self.rng.choice(cands) if cands else None

    @staticmethod
    def single(d: Derivation):
        seqs = d.type.sequents
        if len(seqs) > 1:
            return None
        return list(seqs[0]) if seqs else []

    # -- leaves -----------------------------------------------------------------

    def leaf(self) -> Derivation:
        k = self.rng.randrange(3)
        if k == 0:
            return infer(Close(self.name("x")))
        if k == 1:
            a = self.prop(2)
            return infer(Link(a, self.name("x"), self.name("y")))
        return infer(NIL)

    # -- rules ------------------------------------------------------------------

    def apply(self, rule: str, pool: list[Derivation]) -> Derivation | None:
        r = self.rng
        if rule == "Ax":
            return infer(Link(self.prop(MAX_PROP_DEPTH - 1), self.name("x"), self.name("y")))
        if rule == "One":
            return infer(Close(self.name("x")))
        if rule == "Mix0":
            return infer(NIL)
        if rule == "Mix":
            a = r.choice(pool)
            b = self.pick(pool, lambda d: not (d.type.names() & a.type.names()))
            return None if b is None else self.build(Par(a.process, b.process))
        if rule == "Cut":
            return self.cut(pool)
        if rule == "Bot":
            d = self.pick(pool, lambda d: self.single(d) is not None)
            return None if d is None else self.build(Wait(self.name("x"), d.process))
        if rule == "Tensor":
            d = self.pick(pool, lambda d: len(d.type) == 2)
            if d is None:
                return None
            s1, s2 = d.type.sequents
            if r.random() < 0.5:
                s1, s2 = s2, s1
            y, x = r.choice(sorted(s1.names())), r.choice(sorted(s2.names()))
            return self.build(Send(x, y, d.process))
        if rule == "Parr":
            d = self.pick(pool, lambda d: len(self.single(d) or []) >= 2)
            if d is None:
                return None
            y, x = r.sample(sorted(n for n, _ in self.single(d)), 2)
            return self.build(Recv(x, y, d.process))
        if rule in ("Plus1", "Plus2"):
            d = self.pick(pool, lambda d: bool(self.single(d)))
            if d is None:
                return None
            x, _ = r.choice(self.single(d))
            other = self.prop(2)
            cls = InL if rule == "Plus1" else InR
            return self.build(cls(x, other, d.process))
        if rule == "With":
            return self.with_(pool)
        if rule == "Exists":
            return self.exists(pool)
        if rule == "Forall":
            return self.forall(pool)
        if rule == "Bang":
            return self.bang(pool)
        if rule == "Quest":
            d = self.pick(pool, lambda d: bool(self.single(d)))
            if d is None:
                return None
            y, _ = r.choice(self.single(d))
            return self.build(ClientUse(self.name("x"), y, d.process))
        if rule == "Weaken":
            d = self.pick(pool, lambda d: self.single(d) is not None)
            if d is None:
                return None
            return self.build(ClientDispose(self.name("x"), self.prop(2), d.process))
        if rule == "Contract":
            return self.contract(pool)
        raise ValueError(f"unknown rule {rule}")

    def with_(self, pool: list[Derivation]) -> Derivation | None:
        d = self.pick(pool, lambda d: bool(self.single(d)))
        if d is None:
            return None
        x, _ = self.rng.choice(self.single(d))
        return self.build(Case(x, d.process, d.process))

    def exists(self, pool: list[Derivation]) -> Derivation | None:
        d = self.pick(pool, lambda d: bool(self.single(d)))
        if d is None:
            return None
        x, c = self.rng.choice(self.single(d))
        v = self.rng.choice(self.atoms)
        # abstract c itself, or one immediate component of it
        parts = [c]
        if isinstance(c, (Tensor, Parr, Plus, With)):
            parts += [c.left, c.right]
        w = self.rng.choice(parts)
        if v in ftv(c):
            body, w = Atom(v), c
        elif w is c:
            body = Atom(v)
        else:
            body = type(c)(Atom(v) if c.left is w else c.left, Atom(v) if c.right is w else c.right)
        if not prop_eq(subst(body, w, v), c):
            body, w = Atom(v), c
        return self.build(SendType(x, w, v, body, d.process))

    def forall(self, pool: list[Derivation]) -> Derivation | None:
        d = self.pick(pool, lambda d: bool(self.single(d)))
        if d is None:
            return None
        x, _ = self.rng.choice(self.single(d))
        v = self.rng.choice(self.atoms)
        return self.build(RecvType(x, v, d.process))

    def bang(self, pool: list[Derivation]) -> Derivation | None:
        def fits(d: Derivation) -> bool:
            s = self.single(d)
            if not s:
                return False
            non_client = [n for n, a in s if not isinstance(a, WhyNot)]
            return len(non_client) <= 1 and len(s) <= MAX_CLIENT_CONTEXT + 1

        d = self.pick(pool, fits)
        if d is None:
            return None
        s = self.single(d)
        non_client = [n for n, a in s if not isinstance(a, WhyNot)]
        y = non_client[0] if non_client else self.rng.choice(s)[0]
        return self.build(Server(self.name("x"), y, d.process))

    def contract(self, pool: list[Derivation]) -> Derivation | None:
        def quests(d: Derivation) -> list[tuple[Name, Prop, int]]:
            return [(n, a, i) for i, s in enumerate(d.type.sequents) for n, a in s
                    if isinstance(a, WhyNot)]

        d = self.pick(pool, lambda d: bool(quests(d)))
        if d is None:
            return None
        qs = quests(d)
        pairs = [(a, b) for a, b in itertools.permutations(qs, 2)
                 if a[2] == b[2] and prop_eq(a[1], b[1])]
        if pairs:
            (x, _, _), (y, _, _) = self.rng.choice(pairs)
            return self.build(ClientSpawn(x, y, d.process))
        if self.single(d) is None:
            return None
        x, a, _ = self.rng.choice(qs)
        x2 = self.name("x")
        inner = ClientDispose(x2, a.body, d.process)
        return self.build(ClientSpawn(x, x2, inner))

    # -- cut ------------------------------------------------------------------------

    def cut(self, pool: list[Derivation]) -> Derivation | None:
        r = self.rng
        d = r.choice(pool)
        entries = [(n, a, i) for i, s in enumerate(d.type.sequents) for n, a in s]
        if not entries:
            return None
        # partner inside the same premise
        inner = [(x, y) for (x, a, i), (y, b, j) in itertools.permutations(entries, 2)
                 if i != j and prop_eq(b, dual(a))]
        if inner and r.random() < 0.7:
            x, y = r.choice(inner)
            return self.build(Res(x, y, d.process))
        live = _active(d.process)
        hot = [e for e in entries if e[0] in live]
        x, a, _ = r.choice(hot if hot and r.random() < 0.75 else entries)
        want = dual(a)
        # partner from the pool
        names = d.type.names()

        def has_partner(e: Derivation) -> bool:
            return not (e.type.names() & names) and any(
                prop_eq(b, want) for s in e.type for _, b in s)

        e = self.pick(pool, has_partner) if r.random() < 0.6 else None
        if e is not None:
            y = r.choice([n for s in e.type for n, b in s if prop_eq(b, want)])
            return self.build(Res(x, y, Par(d.process, e.process)))
        y = self.name("y")
        q = self.prove(y, want, 3)
        if q is None:
            q = Link(want, self.name("z"), y)  # y : want, z : a
        return self.build(Res(x, y, Par(d.process, q)))

    def prove(self, y: Name, b: Prop, fuel: int) -> Process | None:
        """A small closed proof of ``y : b`` alone, when one is easy to find."""
        if fuel <= 0:
            return None
        match b:
            case One():
                return Close(y)
            case Bot():
                return Wait(y, NIL)
            case Tensor(l, rt):
                u = self.name("u")
                pl, pr = self.prove(u, l, fuel - 1), self.prove(y, rt, fuel - 1)
                return Send(y, u, Par(pl, pr)) if pl and pr else None
            case Parr(l, rt):
                u = self.name("u")
                q = self.prove2(u, l, y, rt, fuel - 1)
                return Recv(y, u, q) if q else None
            case Plus(l, rt):
                q = self.prove(y, l, fuel - 1)
                if q is not None:
                    return InL(y, rt, q)
                q = self.prove(y, rt, fuel - 1)
                return InR(y, l, q) if q else None
            case With(l, rt):
                pl, pr = self.prove(y, l, fuel - 1), self.prove(y, rt, fuel - 1)
                return Case(y, pl, pr) if pl and pr else None
            case OfCourse(a):
                u = self.name("u")
                q = self.prove(u, a, fuel - 1)
                return Server(y, u, q) if q else None
            case WhyNot(a):
                return ClientDispose(y, a, NIL)
            case Exists(v, body):
                for w in (ONE, BOT):
                    q = self.prove(y, subst(body, w, v), fuel - 1)
                    if q is not None:
                        return SendType(y, w, v, body, q)
                return None
            case Forall(v, body):
                q = self.prove(y, body, fuel - 1)
                return RecvType(y, v, q) if q else None
        return None

    def prove2(self, u: Name, a: Prop, y: Name, b: Prop, fuel: int) -> Process | None:
        """A proof of the single sequent ``u : a, y : b``."""
        if prop_eq(a, dual(b)):
            return Link(b, u, y)
        if isinstance(a, Bot):
            q = self.prove(y, b, fuel)
            return Wait(u, q) if q else None
        if isinstance(b, Bot):
            q = self.prove(u, a, fuel)
            return Wait(y, q) if q else None
        if isinstance(a, WhyNot):
            q = self.prove(y, b, fuel)
            return ClientDispose(u, a.body, q) if q else None
        if isinstance(b, WhyNot):
            q = self.prove(u, a, fuel)
            return ClientDispose(y, b.body, q) if q else None
        return None

    # -- driver ---------------------------------------------------------------------

    def run(self) -> Derivation:
        if self.cfg.max_depth == 1:
            return self.leaf()
        pool = [self.leaf() for _ in range(3)]
        for _ in range(self.cfg.steps):
            rule = self.rng.choices(self.rules, self.weights)[0]
            d = self.apply(rule, pool)
            if d is not None and self.ok(d):
                pool.append(d)
        # the largest judgement built, latest first among equals
        best = max(range(len(pool)), key=lambda i: (pool[i].size(), i))
        return pool[best]


def _active(p: Process) -> set[Name]:
    """Subjects of prefixes not guarded by another prefix."""
    match p:
        case Par(l, r):
            return _active(l) | _active(r)
        case Res(_, _, b):
            return _active(b)
        case Link(_, x, y):
            return {x, y}
        case Case(x, _, _):
            return {x}
    return {p.subject} if hasattr(p, "subject") else set()


def generate(cfg: GenConfig) -> Derivation:
    """A random valid derivation; deterministic for a given configuration."""
    return _Gen(cfg).run()


__all__ = ["DEFAULT_WEIGHTS", "GenConfig", "MAX_CLIENT_CONTEXT", "MAX_PROP_DEPTH", "generate"]
