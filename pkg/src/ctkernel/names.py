"""Channel names and type variables.

A name is an identifier plus a count of trailing primes, so ``z`` and ``z'``
are distinct names that share a base.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

_NAME_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)('*)$")


@dataclass(frozen=True, order=True)
class Name:
    base: str
    primes: int = 0

    def __post_init__(self) -> None:
        if not self.base or self.primes < 0:
            raise ValueError(f"invalid name {self.base!r}/{self.primes}")

    def __str__(self) -> str:
        return self.base + "'" * self.primes

    def __repr__(self) -> str:
        return f"Name({str(self)!r})"

    def primed(self, k: int = 1) -> Name:
        return Name(self.base, self.primes + k)


def name(text: str | Name) -> Name:
    """Parse ``x``, ``x'``, ``x1''`` into a :class:`Name`."""
    if isinstance(text, Name):
        return text
    m = _NAME_RE.match(text)
    if m is None:
        raise ValueError(f"not a name: {text!r}")
    return Name(m.group(1), len(m.group(2)))


def fresh(hint: Name, avoid: Iterable[Name] | set[Name]) -> Name:
    """Lowest-primed variant of ``hint`` (at least one prime) not in ``avoid``."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    k = hint.primes + 1
    while Name(hint.base, k) in avoid:
        k += 1
    return Name(hint.base, k)


def fresh_like(hint: Name, avoid: set[Name] | frozenset[Name]) -> Name:
    """``hint`` itself when unused, otherwise :func:`fresh`."""
    return hint if hint not in avoid else fresh(hint, avoid)


def cache_hash(cls: type) -> type:
    """Memoize the dataclass-generated ``__hash__`` of an immutable tree node.

    Structural hashing of deep terms is otherwise recomputed on every cache
    lookup, which makes memoized recursive functions quadratic.
    """
    raw = cls.__hash__
    tag = cls.__qualname__  # the generated hash ignores the class: Tensor(a, b) ~ Parr(a, b)

    def __hash__(self) -> int:
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = d["_hash"] = hash((tag, raw(self)))
        return h

    cls.__hash__ = __hash__  # type: ignore[method-assign]
    return cls

