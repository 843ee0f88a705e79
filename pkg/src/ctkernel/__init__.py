"""Kernel for the Classical Transitions process calculus."""
from .explorer import (CounterExample, Exhausted, Ok, Trace, check_progress, check_subject_reduction,
                       find_terminating_trace, reachable)
from .generate import GenConfig, generate
from .labels import label_dual, parse_label, show_label
from .lts import InternalInvariantViolation, NoSuchTransition, State, Transition, step, transitions
from .names import Name, fresh, name
from .parser import (ParseError, parse, parse_hypersequent, parse_prop, show, show_hypersequent,
                     show_prop)
from .syntax import alpha_eq, free_names, is_terminated, normalize, prime_copy, rename
from .typecheck import Derivation, TypingError, check, infer, validate
from .types import Hypersequent, Sequent, dual, hs_equal, hs_merge, is_client_context, subst

__all__ = [
    "CounterExample", "Derivation", "Exhausted", "GenConfig", "Hypersequent", "InternalInvariantViolation",
    "Name", "NoSuchTransition", "Ok", "ParseError", "Sequent", "State", "Trace", "Transition",
    "TypingError", "alpha_eq", "check", "check_progress", "check_subject_reduction", "dual",
    "find_terminating_trace", "free_names", "fresh", "generate", "hs_equal", "hs_merge", "infer",
    "is_client_context", "is_terminated", "label_dual", "name", "normalize", "parse",
    "parse_hypersequent", "parse_label", "parse_prop", "prime_copy", "reachable", "rename", "show",
    "show_hypersequent", "show_label", "show_prop", "step", "subst", "transitions", "validate",
]
