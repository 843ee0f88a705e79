"""JSON encodings for hypersequents, derivations, transitions and traces.

Every encoder returns plain dicts and lists; :func:`dumps` fixes key order and
separators so equal values always serialize to identical bytes.
"""
from __future__ import annotations

import json
from typing import Any

from .labels import show_label
from .parser import show, show_prop
from .typecheck import Derivation
from .types import Hypersequent


def hypersequent_json(h: Hypersequent) -> list[dict[str, str]]:
    """One object per sequent, entries sorted by name; sequents sorted by first name."""
    return [{str(n): show_prop(a) for n, a in s} for s in h.sequents]


def derivation_json(d: Derivation) -> dict[str, Any]:
    return {
        "rule": d.rule,
        "conclusion": {"process": show(d.process), "type": hypersequent_json(d.type)},
        "premises": [derivation_json(p) for p in d.premises],
    }


def transition_json(t) -> dict[str, Any]:
    out = {
        "label": show_label(t.label),
        "process": show(t.target.process),
        "type": hypersequent_json(t.target.type),
    }
    if t.spawn_map:
        out["spawn_map"] = {str(a): str(b) for a, b in t.spawn_map}
    return out


def trace_json(trace) -> dict[str, Any]:
    return {
        "start": {"process": show(trace.start.process), "type": hypersequent_json(trace.start.type)},
        "steps": [{"label": show_label(lab), "process": show(s.process),
                   "type": hypersequent_json(s.type)} for lab, s in trace.steps],
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
