"""AST for temporal stream specifications.

Terms are either signal references or function applications; formulas combine
predicate atoms and cell updates with boolean and temporal connectives.  All
nodes are immutable values; source spans are carried for diagnostics but are
excluded from structural equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

RESERVED_WORDS = frozenset({"always", "assume", "guarantee", "X", "F", "G", "U", "W"})


@dataclass(frozen=True)
class Span:
    """Source range, 1-based lines and columns, end exclusive."""

    line: int
    column: int
    end_line: int
    end_column: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.line, self.column, self.end_line, self.end_column)


def _check_ident(name: str) -> None:
    if not IDENT_RE.fullmatch(name):
        raise ValueError(f"not a valid identifier: {name!r}")


@dataclass(frozen=True)
class SignalRef:
    """A bare signal (input or cell) used as a data term."""

    name: str
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.name)


@dataclass(frozen=True)
class Apply:
    """Application of a function symbol to one or more argument terms."""

    function: str
    args: tuple["FunctionTerm", ...]
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.function)
        if len(self.args) < 1:
            raise ValueError("function application needs at least one argument")


FunctionTerm = Union[SignalRef, Apply]


@dataclass(frozen=True)
class PredicateTerm:
    """A predicate applied to data terms, abstracted to a boolean atom.

    Zero arguments means a bare identifier in formula position; whether that
    names a boolean signal or is an error is decided by signature validation,
    not here.
    """

    predicate: str
    args: tuple[FunctionTerm, ...] = ()
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.predicate)


@dataclass(frozen=True)
class Pred:
    term: PredicateTerm
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Update:
    """`[target <- value]`: the system writes `value` to `target` this step."""

    target: str
    value: FunctionTerm
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.target)


@dataclass(frozen=True)
class Not:
    operand: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Next:
    operand: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class WeakUntil:
    left: "Formula"
    right: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Finally:
    operand: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Globally:
    operand: "Formula"
    span: Span | None = field(default=None, compare=False, repr=False)


Formula = Union[
    Pred, Update, Not, And, Or, Implies, Next, Until, WeakUntil, Finally, Globally
]

_UNARY = (Not, Next, Finally, Globally)
_BINARY = (And, Or, Implies, Until, WeakUntil)


@dataclass(frozen=True)
class TslSpec:
    """An assume/guarantee specification: two ordered blocks of formulas."""

    assumes: tuple[Formula, ...] = ()
    guarantees: tuple[Formula, ...] = ()

    def formulas(self) -> tuple[Formula, ...]:
        return self.assumes + self.guarantees


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY):
        return (f.operand,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal of a formula and all its subformulas."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def walk_spec(spec: TslSpec) -> Iterator[Formula]:
    for f in spec.formulas():
        yield from walk(f)


def predicate_terms(f: Formula) -> Iterator[PredicateTerm]:
    for node in walk(f):
        if isinstance(node, Pred):
            yield node.term


def updates(f: Formula) -> Iterator[Update]:
    for node in walk(f):
        if isinstance(node, Update):
            yield node


def term_signals(t: FunctionTerm) -> Iterator[SignalRef]:
    if isinstance(t, SignalRef):
        yield t
    else:
        for a in t.args:
            yield from term_signals(a)


def first_atom(f: Formula) -> Formula:
    """Leftmost atomic subformula (a Pred or Update node)."""
    node = f
    while not isinstance(node, (Pred, Update)):
        node = children(node)[0]
    return node


def _tautology(atom: Formula) -> Formula:
    # (a || !a) spelled with core connectives only.
    return Not(And(Not(atom), Not(Not(atom))))


def desugar(f: Formula) -> Formula:
    """Rewrite to the core connectives {Pred, Update, Not, And, Next, Until}.

    Or/Implies expand through De Morgan, `F a` becomes `(t || !t) U a` for the
    leftmost atom t of a, `G a` is `!F !a`, and `a W b` is `(a U b) || G a`.
    Idempotent: the image contains no derived connectives.
    """
    if isinstance(f, (Pred, Update)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.operand))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Next):
        return Next(desugar(f.operand))
    if isinstance(f, Until):
        return Until(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return desugar(Or(Not(f.left), f.right))
    if isinstance(f, Finally):
        body = desugar(f.operand)
        return Until(_tautology(first_atom(body)), body)
    if isinstance(f, Globally):
        inner = desugar(Finally(Not(f.operand)))
        return Not(inner)
    if isinstance(f, WeakUntil):
        return desugar(Or(Until(f.left, f.right), Globally(f.left)))
    raise TypeError(f"not a formula: {f!r}")


def desugar_spec(spec: TslSpec) -> TslSpec:
    return TslSpec(
        tuple(desugar(f) for f in spec.assumes),
        tuple(desugar(f) for f in spec.guarantees),
    )


def term_to_dict(t: FunctionTerm) -> dict:
    if isinstance(t, SignalRef):
        return {"signal": t.name}
    return {"apply": t.function, "args": [term_to_dict(a) for a in t.args]}


def formula_to_dict(f: Formula) -> dict:
    """Plain-data rendering of a formula, for machine-readable output."""
    if isinstance(f, Pred):
        return {
            "op": "pred",
            "predicate": f.term.predicate,
            "args": [term_to_dict(a) for a in f.term.args],
        }
    if isinstance(f, Update):
        return {"op": "update", "target": f.target, "value": term_to_dict(f.value)}
    name = {
        Not: "not",
        And: "and",
        Or: "or",
        Implies: "implies",
        Next: "next",
        Until: "until",
        WeakUntil: "weak_until",
        Finally: "finally",
        Globally: "globally",
    }[type(f)]
    return {"op": name, "args": [formula_to_dict(c) for c in children(f)]}


def spec_to_dict(spec: TslSpec) -> dict:
    return {
        "assumes": [formula_to_dict(f) for f in spec.assumes],
        "guarantees": [formula_to_dict(f) for f in spec.guarantees],
    }
