"""Pretty-printer emitting the same surface syntax the parser accepts.

Parentheses are inserted only where precedence or associativity requires
them, so `parse(print(ast))` is structurally the identity.
"""

from __future__ import annotations

from .formulas import (
    And,
    Finally,
    Formula,
    FunctionTerm,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Pred,
    SignalRef,
    TslSpec,
    Until,
    Update,
    WeakUntil,
)

_IMPLIES, _OR, _AND, _UNTIL, _UNARY, _ATOM = 1, 2, 3, 4, 5, 6


def format_term(t: FunctionTerm) -> str:
    """Juxtaposition form: `moveLeft ball`, `f (g x) y`."""
    if isinstance(t, SignalRef):
        return t.name
    return " ".join([t.function] + [_term_arg(a) for a in t.args])


def _term_arg(t: FunctionTerm) -> str:
    if isinstance(t, SignalRef):
        return t.name
    return f"({format_term(t)})"


def format_predicate_term(p) -> str:
    """Predicate atom in source syntax, e.g. `leftmost ball`."""
    return " ".join([p.predicate] + [_term_arg(a) for a in p.args])


def format_formula(f: Formula) -> str:
    return _fmt(f, _IMPLIES)


def _fmt(f: Formula, min_prec: int) -> str:
    if isinstance(f, Pred):
        parts = [f.term.predicate] + [_term_arg(a) for a in f.term.args]
        return _wrap(" ".join(parts), _ATOM, min_prec)
    if isinstance(f, Update):
        return _wrap(f"[{f.target} <- {format_term(f.value)}]", _ATOM, min_prec)
    if isinstance(f, Not):
        return _wrap(f"! {_fmt(f.operand, _UNARY)}", _UNARY, min_prec)
    if isinstance(f, Next):
        return _wrap(f"X {_fmt(f.operand, _UNARY)}", _UNARY, min_prec)
    if isinstance(f, Finally):
        return _wrap(f"F {_fmt(f.operand, _UNARY)}", _UNARY, min_prec)
    if isinstance(f, Globally):
        return _wrap(f"G {_fmt(f.operand, _UNARY)}", _UNARY, min_prec)
    if isinstance(f, (Until, WeakUntil)):
        op = "U" if isinstance(f, Until) else "W"
        # right-associative: left operand must bind tighter
        s = f"{_fmt(f.left, _UNARY)} {op} {_fmt(f.right, _UNTIL)}"
        return _wrap(s, _UNTIL, min_prec)
    if isinstance(f, And):
        s = f"{_fmt(f.left, _AND)} && {_fmt(f.right, _UNTIL)}"
        return _wrap(s, _AND, min_prec)
    if isinstance(f, Or):
        s = f"{_fmt(f.left, _OR)} || {_fmt(f.right, _AND)}"
        return _wrap(s, _OR, min_prec)
    if isinstance(f, Implies):
        # right-associative
        s = f"{_fmt(f.left, _OR)} -> {_fmt(f.right, _IMPLIES)}"
        return _wrap(s, _IMPLIES, min_prec)
    raise TypeError(f"not a formula: {f!r}")


def _wrap(s: str, prec: int, min_prec: int) -> str:
    return f"({s})" if prec < min_prec else s


def print_spec(spec: TslSpec) -> str:
    """Render a specification; both blocks are always present."""
    lines = ["always assume {"]
    lines.extend(f"    {format_formula(f)};" for f in spec.assumes)
    lines.append("}")
    lines.append("always guarantee {")
    lines.extend(f"    {format_formula(f)};" for f in spec.guarantees)
    lines.append("}")
    return "\n".join(lines)
