"""Transition labels, label duality and the label text format."""
from __future__ import annotations

from dataclasses import dataclass

from .names import Name
from .parser import ParseError, Parser
from .types import Prop, dual, prop_key


class Label:
    __slots__ = ()
    output = False
    input = False

    def __str__(self) -> str:
        return show_label(self)

    def __repr__(self) -> str:
        return f"<{self}>"


@dataclass(frozen=True, repr=False)
class CloseL(Label):
    subject: Name
    output = True


@dataclass(frozen=True, repr=False)
class WaitL(Label):
    subject: Name
    input = True


@dataclass(frozen=True, repr=False)
class SendL(Label):
    subject: Name
    obj: Name
    a: Prop
    b: Prop
    output = True


@dataclass(frozen=True, repr=False)
class RecvL(Label):
    subject: Name
    obj: Name
    a: Prop
    b: Prop
    input = True


@dataclass(frozen=True, repr=False)
class InlSelL(Label):
    subject: Name
    a: Prop
    b: Prop
    output = True


@dataclass(frozen=True, repr=False)
class InlOffL(Label):
    subject: Name
    a: Prop
    b: Prop
    input = True


@dataclass(frozen=True, repr=False)
class InrSelL(Label):
    subject: Name
    a: Prop
    b: Prop
    output = True


@dataclass(frozen=True, repr=False)
class InrOffL(Label):
    subject: Name
    a: Prop
    b: Prop
    input = True


@dataclass(frozen=True, repr=False)
class SendTypeL(Label):
    subject: Name
    a: Prop
    output = True


@dataclass(frozen=True, repr=False)
class RecvTypeL(Label):
    subject: Name
    a: Prop
    input = True


@dataclass(frozen=True, repr=False)
class UseReqL(Label):
    subject: Name
    obj: Name
    a: Prop
    output = True


@dataclass(frozen=True, repr=False)
class UseAccL(Label):
    subject: Name
    obj: Name
    a: Prop
    input = True


@dataclass(frozen=True, repr=False)
class SpawnReqL(Label):
    subject: Name
    obj: Name
    a: Prop
    output = True


@dataclass(frozen=True, repr=False)
class SpawnAccL(Label):
    subject: Name
    obj: Name
    a: Prop
    input = True


@dataclass(frozen=True, repr=False)
class DispReqL(Label):
    subject: Name
    a: Prop
    output = True


@dataclass(frozen=True, repr=False)
class DispAccL(Label):
    subject: Name
    a: Prop
    input = True


@dataclass(frozen=True, repr=False)
class LinkL(Label):
    src: Name
    dst: Name
    a: Prop


@dataclass(frozen=True, repr=False)
class SyncL(Label):
    out: Label
    inp: Label


@dataclass(frozen=True, repr=False)
class TauL(Label):
    pass


Tau = TauL()

_BINDING = (SendL, RecvL, UseReqL, UseAccL, SpawnReqL, SpawnAccL)

# output-form label -> matching input-form label class
PARTNER = {CloseL: WaitL, SendL: RecvL, InlSelL: InlOffL, InrSelL: InrOffL,
           SendTypeL: RecvTypeL, UseReqL: UseAccL, SpawnReqL: SpawnAccL, DispReqL: DispAccL}


def bound_names(lab: Label) -> frozenset[Name]:
    if isinstance(lab, _BINDING):
        return frozenset((lab.obj,))
    if isinstance(lab, SyncL):
        return bound_names(lab.out) | bound_names(lab.inp)
    return frozenset()


def names(lab: Label) -> frozenset[Name]:
    match lab:
        case TauL():
            return frozenset()
        case SyncL(o, i):
            return names(o) | names(i)
        case LinkL(x, y, _):
            return frozenset((x, y))
    return frozenset((lab.subject,)) | bound_names(lab)


def _payload(lab: Label) -> tuple[Prop, ...]:
    return tuple(getattr(lab, f) for f in ("a", "b") if hasattr(lab, f))


def label_dual(a: Label, b: Label) -> bool:
    """Whether ``a`` and ``b`` are dual, regardless of their channel names.

    Payload types must be pairwise dual, except for type communication where
    sender and receiver carry the same witness.
    """
    if b.output and a.input:
        a, b = b, a
    if not (a.output and b.input) or PARTNER.get(type(a)) is not type(b):
        return False
    if isinstance(a, CloseL):
        return True
    if isinstance(a, SendTypeL):
        return prop_key(a.a) == prop_key(b.a)
    return all(prop_key(dual(p)) == prop_key(q) for p, q in zip(_payload(a), _payload(b)))


def label_key(lab: Label) -> tuple:
    """Identity of a label up to renaming of its bound name."""
    match lab:
        case TauL():
            return ("tau",)
        case SyncL(o, i):
            return ("sync", label_key(o), label_key(i))
        case LinkL(x, y, a):
            return ("link", x, y, prop_key(a))
    bn = () if not isinstance(lab, _BINDING) else ("_",)
    return (type(lab).__name__, lab.subject) + bn + tuple(prop_key(p) for p in _payload(lab))


# -- text format ----------------------------------------------------------------


def show_label(lab: Label) -> str:
    match lab:
        case TauL():
            return "tau"
        case SyncL(o, i):
            return f"<{show_label(o)},{show_label(i)}>"
        case CloseL(x):
            return f"{x}[]"
        case WaitL(x):
            return f"{x}()"
        case SendL(x, y, a, b):
            return f"{x}[{y}:{a};{b}]"
        case RecvL(x, y, a, b):
            return f"{x}({y}:{a};{b})"
        case InlSelL(x, a, b):
            return f"{x}[inl:{_wrap(a)}+{b}]"
        case InlOffL(x, a, b):
            return f"{x}(inl:{_wrap(a)}&{b})"
        case InrSelL(x, a, b):
            return f"{x}[inr:{_wrap(a)}+{b}]"
        case InrOffL(x, a, b):
            return f"{x}(inr:{_wrap(a)}&{b})"
        case SendTypeL(x, a):
            return f"{x}[type {a}]"
        case RecvTypeL(x, a):
            return f"{x}(type {a})"
        case UseReqL(x, y, a):
            return f"?{x}[{y}:{a}]"
        case UseAccL(x, y, a):
            return f"!{x}({y}:{a})"
        case SpawnReqL(x, y, a):
            return f"?{x}[+{y}:{a}]"
        case SpawnAccL(x, y, a):
            return f"!{x}(+{y}:{a})"
        case DispReqL(x, a):
            return f"?{x}[-:{a}]"
        case DispAccL(x, a):
            return f"!{x}(-:{a})"
        case LinkL(x, y, a):
            return f"{x}<->{y}:{a}"
    raise TypeError(f"unknown label {lab!r}")


def _wrap(a: Prop) -> str:
    from .types import Plus, With

    return f"({a})" if isinstance(a, (Plus, With)) else str(a)


class _LabelParser(Parser):
    def label(self) -> Label:
        if self.at("tau"):
            self.i += 1
            return Tau
        if self.at("<"):
            self.i += 1
            o = self.label()
            self.eat(",")
            i = self.label()
            self.eat(">")
            return SyncL(o, i)
        if self.at("?", "!"):
            server = self.tok.text == "!"
            self.i += 1
            x = self.name()
            close = ")" if server else "]"
            self.eat("(" if server else "[")
            if self.at("-"):
                self.i += 1
                self.eat(":")
                a = self.prop()
                self.eat(close)
                return DispAccL(x, a) if server else DispReqL(x, a)
            spawn = self.at("+")
            if spawn:
                self.i += 1
            y = self.name()
            self.eat(":")
            a = self.prop()
            self.eat(close)
            if spawn:
                return SpawnAccL(x, y, a) if server else SpawnReqL(x, y, a)
            return UseAccL(x, y, a) if server else UseReqL(x, y, a)
        x = self.name()
        if self.at("<->"):
            self.i += 1
            y = self.name()
            self.eat(":")
            return LinkL(x, y, self.prop())
        if self.at("["):
            self.i += 1
            if self.at("]"):
                self.i += 1
                return CloseL(x)
            if self.at("inl", "inr"):
                side = self.tok.text
                self.i += 1
                self.eat(":")
                a = self.prop_mult()
                self.eat("+")
                b = self.prop()
                self.eat("]")
                return (InlSelL if side == "inl" else InrSelL)(x, a, b)
            if self.at("type"):
                self.i += 1
                a = self.prop()
                self.eat("]")
                return SendTypeL(x, a)
            y = self.name()
            self.eat(":")
            a = self.prop()
            self.eat(";")
            b = self.prop()
            self.eat("]")
            return SendL(x, y, a, b)
        if self.at("("):
            self.i += 1
            if self.at(")"):
                self.i += 1
                return WaitL(x)
            if self.at("inl", "inr"):
                side = self.tok.text
                self.i += 1
                self.eat(":")
                a = self.prop_mult()
                self.eat("&")
                b = self.prop()
                self.eat(")")
                return (InlOffL if side == "inl" else InrOffL)(x, a, b)
            if self.at("type"):
                self.i += 1
                a = self.prop()
                self.eat(")")
                return RecvTypeL(x, a)
            y = self.name()
            self.eat(":")
            a = self.prop()
            self.eat(";")
            b = self.prop()
            self.eat(")")
            return RecvL(x, y, a, b)
        self.fail("[", "(", "<->")


def parse_label(text: str) -> Label:
    p = _LabelParser(text)
    out = p.label()
    p.end()
    return out


__all__ = ["Label", "ParseError", "Tau", "label_dual", "label_key", "names", "bound_names",
           "parse_label", "show_label"]
