"""Declared symbol tables and specification validation.

The signature table is the data/control boundary: cells and inputs are the
signals a specification may read, functions build data, predicates observe
it.  Validation checks every symbol use against the table and reports all
problems at once.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable

from .errors import FormatError
from .formulas import (
    FunctionTerm,
    IDENT_RE,
    Pred,
    PredicateTerm,
    SignalRef,
    Span,
    TslSpec,
    Update,
    walk_spec,
)
from .printer import format_predicate_term, format_term


class SymbolKind(enum.Enum):
    CELL = "cell"
    INPUT = "input"
    OUTPUT = "output"
    FUNCTION = "function"
    PREDICATE = "predicate"


_READABLE = (SymbolKind.CELL, SymbolKind.INPUT)
_WRITABLE = (SymbolKind.CELL, SymbolKind.OUTPUT)


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    kind: SymbolKind
    arity: int = 0
    description: str = ""

    def __post_init__(self) -> None:
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"not a valid identifier: {self.name!r}")
        if self.kind in (SymbolKind.FUNCTION, SymbolKind.PREDICATE):
            if self.arity < 1:
                raise ValueError(f"{self.kind.value} {self.name} needs arity >= 1")
        elif self.arity != 0:
            raise ValueError(f"{self.kind.value} {self.name} must have arity 0")


@dataclass(frozen=True)
class SignatureTable:
    decls: tuple[SymbolDecl, ...] = ()
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, SymbolDecl] = {}
        for d in self.decls:
            if d.name in index:
                raise ValueError(f"duplicate symbol name: {d.name}")
            index[d.name] = d
        object.__setattr__(self, "_index", index)

    def get(self, name: str) -> SymbolDecl | None:
        return self._index.get(name)

    def of_kind(self, kind: SymbolKind) -> tuple[SymbolDecl, ...]:
        return tuple(d for d in self.decls if d.kind == kind)

    def extended(self, extra: Iterable[SymbolDecl]) -> "SignatureTable":
        return SignatureTable(self.decls + tuple(extra))

    def __len__(self) -> int:
        return len(self.decls)


_SECTIONS = (
    ("cells", SymbolKind.CELL),
    ("inputs", SymbolKind.INPUT),
    ("outputs", SymbolKind.OUTPUT),
    ("functions", SymbolKind.FUNCTION),
    ("predicates", SymbolKind.PREDICATE),
)
_SECTION_KEYS = {name for name, _ in _SECTIONS}


def parse_signatures(text: str) -> SignatureTable:
    """Load a `signatures.json` document.  Unknown fields are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError("$", f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise FormatError("$", "top level must be an object")
    for key in doc:
        if key not in _SECTION_KEYS:
            raise FormatError(f"$.{key}", "unknown field")
    decls: list[SymbolDecl] = []
    seen: set[str] = set()
    for section, kind in _SECTIONS:
        entries = doc.get(section, [])
        if not isinstance(entries, list):
            raise FormatError(f"$.{section}", "must be a list")
        symbolic = kind in (SymbolKind.FUNCTION, SymbolKind.PREDICATE)
        allowed = {"name", "description"} | ({"arity"} if symbolic else set())
        for i, entry in enumerate(entries):
            where = f"$.{section}[{i}]"
            if not isinstance(entry, dict):
                raise FormatError(where, "must be an object")
            for key in entry:
                if key not in allowed:
                    raise FormatError(f"{where}.{key}", "unknown field")
            name = entry.get("name")
            if not isinstance(name, str) or not IDENT_RE.fullmatch(name):
                raise FormatError(f"{where}.name", "must be an identifier")
            if name in seen:
                raise FormatError(f"{where}.name", f"duplicate symbol name: {name}")
            seen.add(name)
            description = entry.get("description", "")
            if not isinstance(description, str):
                raise FormatError(f"{where}.description", "must be a string")
            arity = 0
            if symbolic:
                arity = entry.get("arity")
                if not isinstance(arity, int) or isinstance(arity, bool) or arity < 1:
                    raise FormatError(f"{where}.arity", "must be an integer >= 1")
            decls.append(SymbolDecl(name, kind, arity, description))
    return SignatureTable(tuple(decls))


def load_signatures(path) -> SignatureTable:
    with open(path, encoding="utf-8") as fh:
        return parse_signatures(fh.read())


class IssueCode(enum.Enum):
    UNKNOWN_SYMBOL = "UnknownSymbol"
    ARITY_MISMATCH = "ArityMismatch"
    KIND_MISMATCH = "KindMismatch"
    UPDATE_TARGET_NOT_WRITABLE = "UpdateTargetNotWritable"
    READ_OF_NON_READABLE = "ReadOfNonReadable"


@dataclass(frozen=True)
class ValidationIssue:
    code: IssueCode
    message: str
    span: Span | None = None

    def to_json(self) -> dict:
        return {
            "code": self.code.value,
            "message": self.message,
            "span": list(self.span.as_tuple()) if self.span else None,
        }


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def to_json(self) -> dict:
        return {"ok": self.ok, "issues": [i.to_json() for i in self.issues]}


def validate(spec: TslSpec, table: SignatureTable) -> ValidationReport:
    """Check every symbol use; collects all issues instead of stopping."""
    issues: list[ValidationIssue] = []

    def add(code: IssueCode, message: str, span: Span | None) -> None:
        issues.append(ValidationIssue(code, message, span))

    def check_term(t: FunctionTerm) -> None:
        if isinstance(t, SignalRef):
            decl = table.get(t.name)
            if decl is None:
                add(IssueCode.UNKNOWN_SYMBOL, f"unknown symbol '{t.name}'", t.span)
            elif decl.kind == SymbolKind.OUTPUT:
                add(
                    IssueCode.READ_OF_NON_READABLE,
                    f"output '{t.name}' cannot be read",
                    t.span,
                )
            elif decl.kind == SymbolKind.FUNCTION:
                add(
                    IssueCode.ARITY_MISMATCH,
                    f"function '{t.name}' expects {decl.arity} argument(s), got 0",
                    t.span,
                )
            elif decl.kind == SymbolKind.PREDICATE:
                add(
                    IssueCode.KIND_MISMATCH,
                    f"predicate '{t.name}' used as a data term",
                    t.span,
                )
            return
        decl = table.get(t.function)
        if decl is None:
            add(IssueCode.UNKNOWN_SYMBOL, f"unknown symbol '{t.function}'", t.span)
        elif decl.kind != SymbolKind.FUNCTION:
            add(
                IssueCode.KIND_MISMATCH,
                f"{decl.kind.value} '{t.function}' applied like a function",
                t.span,
            )
        elif decl.arity != len(t.args):
            add(
                IssueCode.ARITY_MISMATCH,
                f"function '{t.function}' expects {decl.arity} argument(s), "
                f"got {len(t.args)}",
                t.span,
            )
        for a in t.args:
            check_term(a)

    def check_pred(p: PredicateTerm) -> None:
        decl = table.get(p.predicate)
        if decl is None:
            add(IssueCode.UNKNOWN_SYMBOL, f"unknown symbol '{p.predicate}'", p.span)
        elif decl.kind == SymbolKind.PREDICATE:
            if decl.arity != len(p.args):
                add(
                    IssueCode.ARITY_MISMATCH,
                    f"predicate '{p.predicate}' expects {decl.arity} argument(s), "
                    f"got {len(p.args)}",
                    p.span,
                )
        elif decl.kind in _READABLE:
            if p.args:
                add(
                    IssueCode.KIND_MISMATCH,
                    f"{decl.kind.value} '{p.predicate}' applied like a predicate",
                    p.span,
                )
        elif decl.kind == SymbolKind.OUTPUT:
            if p.args:
                add(
                    IssueCode.KIND_MISMATCH,
                    f"output '{p.predicate}' applied like a predicate",
                    p.span,
                )
            else:
                add(
                    IssueCode.READ_OF_NON_READABLE,
                    f"output '{p.predicate}' cannot be read",
                    p.span,
                )
        else:  # function symbol in formula position
            add(
                IssueCode.KIND_MISMATCH,
                f"function '{p.predicate}' used as a predicate",
                p.span,
            )
        for a in p.args:
            check_term(a)

    for node in walk_spec(spec):
        if isinstance(node, Pred):
            check_pred(node.term)
        elif isinstance(node, Update):
            decl = table.get(node.target)
            if decl is None:
                add(
                    IssueCode.UNKNOWN_SYMBOL,
                    f"unknown symbol '{node.target}'",
                    node.span,
                )
            elif decl.kind not in _WRITABLE:
                add(
                    IssueCode.UPDATE_TARGET_NOT_WRITABLE,
                    f"{decl.kind.value} '{node.target}' cannot be updated",
                    node.span,
                )
            check_term(node.value)

    return ValidationReport(tuple(issues))


@dataclass(frozen=True)
class AtomAlphabet:
    """The boolean atoms of a specification at the abstraction boundary.

    `preds` are the distinct predicate terms; `updates` maps each writable
    signal to its distinct chosen-update terms, always including the
    self-update (the signal keeps its value).  Orders are deterministic:
    sorted by rendered term text, cells sorted by name.
    """

    preds: tuple[PredicateTerm, ...]
    updates: tuple[tuple[str, tuple[FunctionTerm, ...]], ...]

    @property
    def cells(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.updates)

    def update_terms(self, cell: str) -> tuple[FunctionTerm, ...]:
        for c, terms in self.updates:
            if c == cell:
                return terms
        raise KeyError(cell)

    def steps_count(self) -> int:
        n = 2 ** len(self.preds)
        for _, terms in self.updates:
            n *= len(terms)
        return n

    @staticmethod
    def build(
        preds: Iterable[PredicateTerm],
        updates: dict[str, set[FunctionTerm]],
    ) -> "AtomAlphabet":
        pred_tuple = tuple(sorted(set(preds), key=format_predicate_term))
        cells = []
        for cell in sorted(updates):
            terms = set(updates[cell])
            terms.add(SignalRef(cell))
            cells.append((cell, tuple(sorted(terms, key=format_term))))
        return AtomAlphabet(pred_tuple, tuple(cells))

    def union(self, other: "AtomAlphabet") -> "AtomAlphabet":
        updates: dict[str, set[FunctionTerm]] = {}
        for alpha in (self, other):
            for cell, terms in alpha.updates:
                updates.setdefault(cell, set()).update(terms)
        return AtomAlphabet.build(self.preds + other.preds, updates)


def atom_alphabet(spec: TslSpec, table: SignatureTable) -> AtomAlphabet:
    """Atoms of a validated spec; every declared writable signal gets an
    update set even when the spec never writes it."""
    preds: list[PredicateTerm] = []
    updates: dict[str, set[FunctionTerm]] = {
        d.name: set() for d in table.decls if d.kind in _WRITABLE
    }
    for node in walk_spec(spec):
        if isinstance(node, Pred):
            preds.append(node.term)
        elif isinstance(node, Update):
            updates.setdefault(node.target, set()).add(node.value)
    return AtomAlphabet.build(preds, updates)


def spec_alphabet(spec: TslSpec) -> AtomAlphabet:
    """Structural atoms of a spec alone: cells are its update targets."""
    preds: list[PredicateTerm] = []
    updates: dict[str, set[FunctionTerm]] = {}
    for node in walk_spec(spec):
        if isinstance(node, Pred):
            preds.append(node.term)
        elif isinstance(node, Update):
            updates.setdefault(node.target, set()).add(node.value)
    return AtomAlphabet.build(preds, updates)
