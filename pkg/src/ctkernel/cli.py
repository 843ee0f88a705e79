"""The ``ct`` command: type checking, transitions and exploration for ``.ct`` files.

Exit codes: 0 success, 1 type error, 2 parse error, 3 budget exhausted,
4 usage error.  Every error is reported on stderr as one line starting with
``CT-ERR:<class>:``.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Sequence, TextIO

from .explorer import Exhausted, Trace, find_terminating_trace, reachable
from .generate import GenConfig, generate
from .labels import ParseError as LabelParseError
from .labels import RecvTypeL, TauL, label_key, parse_label, show_label
from .lts import (InternalInvariantViolation, NoSuchTransition, State, Transition, pending_receives,
                  recv_type_step, transitions)
from .parser import ParseError, parse, parse_hypersequent, show, show_hypersequent
from .serial import derivation_json, dumps, hypersequent_json, trace_json, transition_json
from .syntax import is_terminated, normalize
from .typecheck import TypingError, infer
from .types import hs_equal

OK, TYPE_ERROR, PARSE_ERROR, EXHAUSTED, USAGE = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, cls: str, msg: str) -> None:
        super().__init__(msg)
        self.code, self.cls, self.msg = code, cls, msg


class _Args(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise CliError(USAGE, "Usage", message)


class _Style:
    def __init__(self, stream: TextIO) -> None:
        self.on = os.environ.get("CT_COLOR", "1") != "0" and stream.isatty()

    def __call__(self, text: str, code: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.on else text


# -- input ------------------------------------------------------------------------


def _load(path: str) -> State:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise CliError(USAGE, "Io", f"{path}: {e.strerror}") from None
    try:
        p = parse(text)
    except ParseError as e:
        raise CliError(PARSE_ERROR, "ParseError", f"{path}: {e}") from None
    try:
        return State(infer(p))
    except TypingError as e:
        raise CliError(TYPE_ERROR, e.kind, f"{path}: {e}") from None


def _select(s: State, ts: list[Transition], item: str) -> Transition:
    """Resolve a menu number (1-based) or a label text against the enabled transitions."""
    item = item.strip()
    if item.isdigit():
        i = int(item)
        if not 1 <= i <= len(ts):
            raise CliError(USAGE, "NoSuchTransition", f"choice {i} out of range 1..{len(ts)}")
        return ts[i - 1]
    try:
        lab = parse_label(item)
    except (LabelParseError, ParseError) as e:
        raise CliError(PARSE_ERROR, "ParseError", f"label {item!r}: {e}") from None
    if isinstance(lab, RecvTypeL):
        try:
            return recv_type_step(s, lab.subject, lab.a)
        except NoSuchTransition as e:
            raise CliError(USAGE, "NoSuchTransition", str(e)) from None
    want = label_key(lab)
    for t in ts:
        if label_key(t.label) == want:
            return t
    raise CliError(USAGE, "NoSuchTransition",
                   str(NoSuchTransition(item, [show_label(t.label) for t in ts])))


# -- commands -----------------------------------------------------------------------


def _state_json(s: State) -> dict:
    return {"process": show(s.process), "type": hypersequent_json(s.type)}


def cmd_check(a, out: TextIO, style: _Style) -> int:
    s = _load(a.path)
    if a.expect is not None:
        try:
            want = parse_hypersequent(a.expect)
        except ParseError as e:
            raise CliError(PARSE_ERROR, "ParseError", f"--expect: {e}") from None
        if not hs_equal(want, s.type):
            if a.json:
                out.write(dumps({"expected": hypersequent_json(want),
                                 "actual": hypersequent_json(s.type)}) + "\n")
            else:
                out.write(f"- expected: {show_hypersequent(want)}\n")
                out.write(f"+ actual:   {show_hypersequent(s.type)}\n")
            raise CliError(TYPE_ERROR, "TypeMismatch",
                           f"{a.path}: expected {show_hypersequent(want)}, "
                           f"synthesized {show_hypersequent(s.type)}")
    if a.json:
        out.write(dumps(derivation_json(s.derivation)) + "\n")
    else:
        out.write(show_hypersequent(s.type) + "\n")
    return OK


def _print_transitions(s: State, ts: list[Transition], a, out: TextIO, style: _Style,
                       numbered: bool = False) -> None:
    if a.json:
        out.write(dumps({"state": _state_json(s), "transitions": [transition_json(t) for t in ts],
                         "pending_type_receives": [str(x) for x in pending_receives(s)]}) + "\n")
        return
    for i, t in enumerate(ts, 1):
        lead = f"{i:>3}) " if numbered else ""
        out.write(f"{lead}{style(show_label(t.label), '36')}  ==>  {show(t.target.process)}\n")
    for x in pending_receives(s):
        out.write(f"{'     ' if numbered else ''}{style(f'{x}(type A)', '36')}  ==>  "
                  f"(awaiting a witness A; select it by label)\n")


def cmd_trans(a, out: TextIO, style: _Style) -> int:
    s = _load(a.path)
    _print_transitions(s, transitions(s), a, out, style)
    return OK


def cmd_step(a, out: TextIO, style: _Style, inp: TextIO) -> int:
    s = _load(a.path)
    trace = Trace(s)
    script = list(a.label or [])
    if not a.interactive and not script:
        raise CliError(USAGE, "Usage", "step needs --label selections or --interactive")
    while script or a.interactive:
        if a.interactive and not script:
            if _done(s):
                break
            ts = transitions(s)
            out.write(f"{show(s.process)}  ::  {show_hypersequent(s.type)}\n")
            _print_transitions(s, ts, argparse.Namespace(json=False), out, style, numbered=True)
            out.write("select (number or label, q to quit)> ")
            out.flush()
            line = inp.readline()
            if not line or line.strip() in ("q", "quit"):
                break
            script.append(line)
        item = script.pop(0)
        t = _select(s, transitions(s), item)
        s = t.target
        trace.steps.append((t.label, s))
    if a.json:
        out.write(dumps(trace_json(trace)) + "\n")
    else:
        for lab, st in trace.steps:
            out.write(f"{show_label(lab)}  ==>  {show(st.process)}\n")
        out.write(f"final: {show(s.process)}  ::  {show_hypersequent(s.type)}\n")
    return OK


def _done(s: State) -> bool:
    return is_terminated(s.process) or not (transitions(s) or pending_receives(s))


def cmd_run(a, out: TextIO, style: _Style) -> int:
    s = _load(a.path)
    rng = random.Random(a.seed)
    trace = Trace(s)
    for _ in range(a.max_steps):
        taus = [t for t in transitions(s) if isinstance(t.label, TauL)]
        if not taus:
            break
        t = taus[0] if a.policy == "first" else rng.choice(taus)
        s = t.target
        trace.steps.append((t.label, s))
    else:
        if any(isinstance(t.label, TauL) for t in transitions(s)):
            _emit_trace(trace, a, out)
            raise CliError(EXHAUSTED, "BudgetExhausted",
                           f"still reducing after {a.max_steps} tau steps")
    _emit_trace(trace, a, out)
    if not a.json:
        rest = transitions(s)
        if rest:
            out.write("observable: " + ", ".join(show_label(t.label) for t in rest) + "\n")
    return OK


def _emit_trace(trace: Trace, a, out: TextIO) -> None:
    if a.json:
        out.write(dumps(trace_json(trace)) + "\n")
        return
    out.write(f"start: {show(trace.start.process)}  ::  {show_hypersequent(trace.start.type)}\n")
    for lab, st in trace.steps:
        out.write(f"{show_label(lab)}  ==>  {show(st.process)}\n")


def cmd_explore(a, out: TextIO, style: _Style) -> int:
    s = _load(a.path)
    if a.goal == "terminate":
        budget = a.budget if a.budget is not None else 4 * s.derivation.size()
        try:
            tr = find_terminating_trace(s, budget)
        except Exhausted as e:
            raise CliError(EXHAUSTED, "BudgetExhausted", str(e)) from None
        _emit_trace(tr, a, out)
        return OK
    r = reachable(s, a.steps, a.budget)
    if a.json:
        out.write(dumps({"states": [_state_json(st) for st in r.states],
                         "edges": [[i, show_label(lab), j] for i, lab, j in r.edges],
                         "truncated": r.truncated}) + "\n")
    else:
        for i, st in enumerate(r.states):
            out.write(f"[{i}] {show(st.process)}  ::  {show_hypersequent(st.type)}\n")
        for i, lab, j in r.edges:
            out.write(f"[{i}] --{show_label(lab)}--> [{j}]\n")
        out.write(f"{len(r.states)} states, {len(r.edges)} edges"
                  f"{', truncated' if r.truncated else ''}\n")
    return OK


def cmd_gen(a, out: TextIO, style: _Style) -> int:
    for k in range(a.count):
        d = generate(GenConfig(seed=a.seed + k, max_depth=a.depth))
        if a.json:
            out.write(dumps({"seed": a.seed + k, "derivation": derivation_json(d)}) + "\n")
        else:
            out.write(f"{show(d.process)}  ::  {show_hypersequent(d.type)}\n")
    return OK


def _dot_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot(s: State, max_states: int, max_steps: int = 1_000_000) -> str:
    """The reachable transition system as a DOT digraph, nodes named by α-normal text."""
    r = reachable(s, max_steps, max_states)
    lines = ["digraph lts {", "  node [shape=box, fontname=monospace];"]
    for i, st in enumerate(r.states):
        attrs = ", peripheries=2" if i == 0 else ""
        lines.append(f"  s{i} [label={_dot_string(show(normalize(st.process)))}{attrs}];")
    for i, lab, j in r.edges:
        lines.append(f"  s{i} -> s{j} [label={_dot_string(show_label(lab))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_graph(a, out: TextIO, style: _Style) -> int:
    s = _load(a.path)
    text = dot(s, a.max_states)
    if a.out in (None, "-"):
        out.write(text)
    else:
        try:
            with open(a.out, "w", encoding="utf-8") as f:
                f.write(text)
        except OSError as e:
            raise CliError(USAGE, "Io", f"{a.out}: {e.strerror}") from None
    return OK


# -- entry point ----------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Args(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    ap = _Args(prog="ct", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", parser_class=_Args)

    p = sub.add_parser("check", parents=[common], help="synthesize the type of a process")
    p.add_argument("path")
    p.add_argument("--expect", metavar="TYPE", help="hypersequent the process must have")

    p = sub.add_parser("trans", parents=[common], help="list enabled transitions")
    p.add_argument("path")

    p = sub.add_parser("step", parents=[common], help="fire transitions by number or label")
    p.add_argument("path")
    p.add_argument("-l", "--label", action="append", metavar="SEL",
                   help="menu number or label text; repeatable, applied in order")
    p.add_argument("-i", "--interactive", action="store_true")

    p = sub.add_parser("run", parents=[common], help="fire tau steps until none is left")
    p.add_argument("path")
    p.add_argument("--max-steps", type=_natural, default=1000)
    p.add_argument("--policy", choices=("first", "random"), default="first")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("explore", parents=[common], help="search for termination or map states")
    p.add_argument("path")
    p.add_argument("--goal", choices=("terminate", "graph"), default="terminate")
    p.add_argument("--budget", type=_positive, default=None,
                   help="expansions (terminate) or stored states (graph)")
    p.add_argument("--steps", type=_natural, default=10, help="depth bound for --goal graph")

    p = sub.add_parser("gen", parents=[common], help="print random well-typed processes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=_positive, default=6)
    p.add_argument("--count", type=_positive, default=1)

    p = sub.add_parser("graph", parents=[common], help="write the reachable LTS as DOT")
    p.add_argument("path")
    p.add_argument("--max-states", type=_positive, default=200)
    p.add_argument("-o", "--out", default=None)
    return ap


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
         stderr: TextIO | None = None, stdin: TextIO | None = None) -> int:
    out, err = stdout or sys.stdout, stderr or sys.stderr
    style = _Style(out)
    try:
        a = build_parser().parse_args(list(sys.argv[1:] if argv is None else argv))
        if a.command is None:
            raise CliError(USAGE, "Usage", "missing command (check, trans, step, run, explore, "
                                           "gen, graph)")
        if a.command == "step":
            return cmd_step(a, out, style, stdin or sys.stdin)
        return {"check": cmd_check, "trans": cmd_trans, "run": cmd_run, "explore": cmd_explore,
                "gen": cmd_gen, "graph": cmd_graph}[a.command](a, out, style)
    except CliError as e:
        err.write(f"CT-ERR:{e.cls}: {e.msg}\n")
        return e.code
    except InternalInvariantViolation as e:
        err.write(f"CT-ERR:InternalInvariantViolation: {e}\n")
        return TYPE_ERROR


if __name__ == "__main__":
    sys.exit(main())
