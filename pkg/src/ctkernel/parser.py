"""Concrete syntax: lexer, recursive-descent parser and printer.

Process grammar (``|`` lowest and left-associative, ``( P )`` groups)::

    P ::= 0 | P | P | new (x,y){P} | x[y].P | x(y).P | close x | wait x.P
        | x[inl:B].P | x[inr:A].P | case x {inl: P; inr: P}
        | x[type A as ex X.B].P | x(type X).P | link [A] x y
        | !x(y).P | ?x[y].P | spawn x[x'].P | dispose [A] x.P

Types: ``1 bot 0 top A*B A par B A+B A&B !A ?A ex X.A all X.A X ~X``; unary
binds tightest, then ``*``/``par``, then ``+``/``&`` (binary operators are
right-associative); quantifiers extend as far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .names import Name
from .syntax import (NIL, Case, ClientDispose, ClientSpawn, ClientUse, Close, InL, InR, Link, Nil,
                     Par, Process, Recv, RecvType, Res, Send, SendType, Server, Wait)
from .types import (BOT, ONE, TOP, ZERO, Atom, Bot, DualAtom, Exists, Forall, OfCourse, One, Parr,
                    EMPTY, Hypersequent, NameClash, Plus, Prop, Sequent, Tensor, Top, WhyNot,
                    With, Zero)

KEYWORDS = {"new", "close", "wait", "case", "inl", "inr", "type", "as", "ex", "all", "link",
            "spawn", "dispose", "par", "bot", "top", "tau"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+|--[^\n]*)
  | (?P<nl>\n)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<num>[0-9]+)
  | (?P<punct><->|[()\[\]{},.|:;!?*+&~<>\-=])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, line: int, col: int, expected: set[str], lexeme: str) -> None:
        self.line, self.col, self.expected, self.lexeme = line, col, expected, lexeme
        exp = " or ".join(f'"{e}"' for e in sorted(expected))
        super().__init__(f"line {line}, column {col}: expected {exp}, found {lexeme or 'end of input'!r}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, num, punct, kw, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, {"token"}, text[pos])
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind == "ident":
            t = m.group()
            out.append(Token("kw" if t in KEYWORDS else "ident", t, line, col))
        elif kind in ("num", "punct"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class Parser:
    def __init__(self, text: str) -> None:
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, *expected: str):
        t = self.tok
        raise ParseError(t.line, t.col, set(expected), t.text)

    def at(self, *texts: str) -> bool:
        return self.tok.kind != "eof" and self.tok.kind != "ident" and self.tok.text in texts

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.fail(text)
        t = self.tok
        self.i += 1
        return t

    def name(self) -> Name:
        t = self.tok
        if t.kind != "ident":
            self.fail("name")
        self.i += 1
        base = t.text.rstrip("'")
        return Name(base, len(t.text) - len(base))

    def end(self) -> None:
        if self.tok.kind != "eof":
            self.fail("end of input")

    # -- types --------------------------------------------------------------

    def prop(self) -> Prop:
        left = self.prop_mult()
        if self.at("+", "&"):
            op = self.tok.text
            self.i += 1
            right = self.prop()
            return Plus(left, right) if op == "+" else With(left, right)
        return left

    def prop_mult(self) -> Prop:
        left = self.prop_unary()
        if self.at("*", "par"):
            op = self.tok.text
            self.i += 1
            right = self.prop_mult()
            return Tensor(left, right) if op == "*" else Parr(left, right)
        return left

    def prop_unary(self) -> Prop:
        t = self.tok
        if self.at("!"):
            self.i += 1
            return OfCourse(self.prop_unary())
        if self.at("?"):
            self.i += 1
            return WhyNot(self.prop_unary())
        if self.at("~"):
            self.i += 1
            return DualAtom(self.name())
        if self.at("ex", "all"):
            self.i += 1
            v = self.name()
            self.eat(".")
            body = self.prop()
            return Exists(v, body) if t.text == "ex" else Forall(v, body)
        if self.at("("):
            self.i += 1
            a = self.prop()
            self.eat(")")
            return a
        if t.kind == "num" and t.text in ("0", "1"):
            self.i += 1
            return ONE if t.text == "1" else ZERO
        if self.at("bot"):
            self.i += 1
            return BOT
        if self.at("top"):
            self.i += 1
            return TOP
        if t.kind == "ident":
            return Atom(self.name())
        self.fail("1", "bot", "0", "top", "!", "?", "~", "ex", "all", "(", "type variable")

    # -- processes ------------------------------------------------------------

    def process(self) -> Process:
        p = self.prefix()
        while self.at("|"):
            self.i += 1
            p = Par(p, self.prefix())
        return p

    def prefix(self) -> Process:
        t = self.tok
        if t.kind == "num" and t.text == "0":
            self.i += 1
            return NIL
        if self.at("("):
            self.i += 1
            p = self.process()
            self.eat(")")
            return p
        if self.at("new"):
            self.i += 1
            self.eat("(")
            x = self.name()
            self.eat(",")
            y = self.name()
            self.eat(")")
            self.eat("{")
            p = self.process()
            self.eat("}")
            return Res(x, y, p)
        if self.at("close"):
            self.i += 1
            return Close(self.name())
        if self.at("wait"):
            self.i += 1
            x = self.name()
            return Wait(x, self.cont())
        if self.at("case"):
            self.i += 1
            x = self.name()
            self.eat("{")
            self.eat("inl")
            self.eat(":")
            left = self.process()
            self.eat(";")
            self.eat("inr")
            self.eat(":")
            right = self.process()
            self.eat("}")
            return Case(x, left, right)
        if self.at("link"):
            self.i += 1
            self.eat("[")
            a = self.prop()
            self.eat("]")
            x = self.name()
            y = self.name()
            return Link(a, x, y)
        if self.at("!"):
            self.i += 1
            x = self.name()
            self.eat("(")
            y = self.name()
            self.eat(")")
            return Server(x, y, self.cont())
        if self.at("?"):
            self.i += 1
            x = self.name()
            self.eat("[")
            y = self.name()
            self.eat("]")
            return ClientUse(x, y, self.cont())
        if self.at("spawn"):
            self.i += 1
            x = self.name()
            self.eat("[")
            y = self.name()
            self.eat("]")
            return ClientSpawn(x, y, self.cont())
        if self.at("dispose"):
            self.i += 1
            self.eat("[")
            a = self.prop()
            self.eat("]")
            x = self.name()
            return ClientDispose(x, a, self.cont())
        if t.kind == "ident":
            x = self.name()
            if self.at("["):
                self.i += 1
                if self.at("inl", "inr"):
                    side = self.tok.text
                    self.i += 1
                    self.eat(":")
                    a = self.prop()
                    self.eat("]")
                    return (InL if side == "inl" else InR)(x, a, self.cont())
                if self.at("type"):
                    self.i += 1
                    w = self.prop()
                    self.eat("as")
                    self.eat("ex")
                    v = self.name()
                    self.eat(".")
                    b = self.prop()
                    self.eat("]")
                    return SendType(x, w, v, b, self.cont())
                if self.tok.kind != "ident":
                    self.fail("name", "inl", "inr", "type")
                y = self.name()
                self.eat("]")
                return Send(x, y, self.cont())
            if self.at("("):
                self.i += 1
                if self.at("type"):
                    self.i += 1
                    v = self.name()
                    self.eat(")")
                    return RecvType(x, v, self.cont())
                y = self.name()
                self.eat(")")
                return Recv(x, y, self.cont())
            self.fail("[", "(")
        self.fail("0", "(", "new", "close", "wait", "case", "link", "!", "?", "spawn", "dispose",
                  "name")

    def cont(self) -> Process:
        self.eat(".")
        return self.prefix()


def parse(text: str) -> Process:
    p = Parser(text)
    out = p.process()
    p.end()
    return out


def parse_prop(text: str) -> Prop:
    p = Parser(text)
    out = p.prop()
    p.end()
    return out


def parse_hypersequent(text: str) -> Hypersequent:
    """Read ``x : A, y : B || z : C``; ``(empty)`` or blank text is the empty hypersequent."""
    p = Parser(text)
    if p.tok.kind == "eof":
        return EMPTY
    if p.at("(") and p.peek().text == "empty":
        p.i += 2
        p.eat(")")
        p.end()
        return EMPTY
    seqs: list[list[tuple[Name, Prop]]] = [[]]
    while True:
        x = p.name()
        p.eat(":")
        seqs[-1].append((x, p.prop()))
        if p.at(","):
            p.i += 1
        elif p.at("|") and p.peek().text == "|":
            p.i += 2
            seqs.append([])
        else:
            break
    p.end()
    try:
        return Hypersequent.of(Sequent.of(s) for s in seqs)
    except NameClash as e:
        t = p.tok
        raise ParseError(t.line, t.col, {"distinct names"}, str(e.name)) from None


# -- printing -----------------------------------------------------------------

_LEVEL = {Plus: 1, With: 1, Tensor: 2, Parr: 2}
_OP = {Plus: "+", With: "&", Tensor: "*", Parr: "par"}


def show_prop(a: Prop) -> str:
    match a:
        case One():
            return "1"
        case Bot():
            return "bot"
        case Zero():
            return "0"
        case Top():
            return "top"
        case Atom(v):
            return str(v)
        case DualAtom(v):
            return f"~{v}"
        case OfCourse(b) | WhyNot(b):
            sym = "!" if isinstance(a, OfCourse) else "?"
            inner = show_prop(b)
            if type(b) in _LEVEL or isinstance(b, (Exists, Forall)):
                inner = f"({inner})"
            return sym + inner
        case Exists(v, b) | Forall(v, b):
            kw = "ex" if isinstance(a, Exists) else "all"
            return f"{kw} {v}.{show_prop(b)}"
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            lvl = _LEVEL[type(a)]
            ls, rs = show_prop(l), show_prop(r)
            if isinstance(l, (Exists, Forall)) or _LEVEL.get(type(l), 9) <= lvl:
                ls = f"({ls})"
            if isinstance(r, (Exists, Forall)) or _LEVEL.get(type(r), 9) < lvl:
                rs = f"({rs})"
            return f"{ls} {_OP[type(a)]} {rs}"
    raise TypeError(f"not a proposition: {a!r}")


def show_hypersequent(h: Hypersequent) -> str:
    if not h.sequents:
        return "(empty)"
    return " || ".join(", ".join(f"{x} : {show_prop(a)}" for x, a in s) for s in h.sequents)


def show(p: Process) -> str:
    match p:
        case Nil():
            return "0"
        case Par(l, r):
            rs = show(r)
            if isinstance(r, Par):
                rs = f"({rs})"
            return f"{show(l)} | {rs}"
        case Res(x, y, q):
            return f"new ({x},{y}){{{show(q)}}}"
        case Close(x):
            return f"close {x}"
        case Wait(x, q):
            return f"wait {x}.{_cont(q)}"
        case Case(x, l, r):
            return f"case {x} {{inl: {show(l)}; inr: {show(r)}}}"
        case Link(a, x, y):
            return f"link [{show_prop(a)}] {x} {y}"
        case Server(x, y, q):
            return f"!{x}({y}).{_cont(q)}"
        case ClientUse(x, y, q):
            return f"?{x}[{y}].{_cont(q)}"
        case ClientSpawn(x, y, q):
            return f"spawn {x}[{y}].{_cont(q)}"
        case ClientDispose(x, a, q):
            return f"dispose [{show_prop(a)}] {x}.{_cont(q)}"
        case InL(x, a, q):
            return f"{x}[inl:{show_prop(a)}].{_cont(q)}"
        case InR(x, a, q):
            return f"{x}[inr:{show_prop(a)}].{_cont(q)}"
        case SendType(x, w, v, b, q):
            return f"{x}[type {show_prop(w)} as ex {v}.{show_prop(b)}].{_cont(q)}"
        case RecvType(x, v, q):
            return f"{x}(type {v}).{_cont(q)}"
        case Send(x, y, q):
            return f"{x}[{y}].{_cont(q)}"
        case Recv(x, y, q):
            return f"{x}({y}).{_cont(q)}"
    raise TypeError(f"unknown process {p!r}")


def _cont(q: Process) -> str:
    s = show(q)
    return f"({s})" if isinstance(q, Par) else s
