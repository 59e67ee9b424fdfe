"""Mealy-machine controllers: loading, validation, and source emission.

A machine is a set of integer states with guarded transitions.  Guards are
conjunctions of possibly-negated predicate atoms; each transition chooses one
update term per written signal.  Machines are ingested from `machine.json`
documents produced by an external synthesizer and can be emitted as a
JavaScript-style controller built from `if` chains over `currentState`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product

from .errors import FormatError
from .formulas import FunctionTerm, PredicateTerm, SignalRef
from .parser import ParseError, parse_term
from .printer import format_predicate_term


class NondeterministicGuards(Exception):
    """Two guards at one state admit a common predicate valuation."""

    def __init__(self, state: int, pair: tuple[int, int]):
        self.state = state
        self.pair = pair
        super().__init__(
            f"state {state}: transitions {pair[0]} and {pair[1]} overlap"
        )


@dataclass(frozen=True)
class GuardLiteral:
    term: PredicateTerm
    negated: bool = False


@dataclass(frozen=True)
class Transition:
    source: int
    guard: tuple[GuardLiteral, ...]
    updates: tuple[tuple[str, FunctionTerm], ...]
    target: int

    def updates_map(self) -> dict[str, FunctionTerm]:
        return dict(self.updates)

    def guard_satisfied(self, valuation: dict[PredicateTerm, bool]) -> bool:
        return all(valuation[lit.term] != lit.negated for lit in self.guard)


@dataclass(frozen=True)
class MealyMachine:
    states: tuple[int, ...]
    initial: int
    transitions: tuple[Transition, ...]

    def __post_init__(self) -> None:
        state_set = set(self.states)
        if self.initial not in state_set:
            raise ValueError(f"initial state {self.initial} not declared")
        for t in self.transitions:
            if t.source not in state_set or t.target not in state_set:
                raise ValueError(f"transition {t.source}->{t.target} leaves the state set")

    def transitions_from(self, state: int) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.source == state)

    def step(
        self, state: int, valuation: dict[PredicateTerm, bool]
    ) -> Transition | None:
        for t in self.transitions_from(state):
            if t.guard_satisfied(valuation):
                return t
        return None

    def guard_atoms(self) -> tuple[PredicateTerm, ...]:
        seen: dict[PredicateTerm, None] = {}
        for t in self.transitions:
            for lit in t.guard:
                seen.setdefault(lit.term)
        return tuple(seen)


def _check_determinism(machine: MealyMachine) -> None:
    # Truth-table enumeration over each pair's guard atoms.
    for state in machine.states:
        trans = machine.transitions_from(state)
        for (i, a), (j, b) in combinations(enumerate(trans), 2):
            atoms = list(dict.fromkeys(
                [lit.term for lit in a.guard] + [lit.term for lit in b.guard]
            ))
            for bits in product((False, True), repeat=len(atoms)):
                valuation = dict(zip(atoms, bits))
                if a.guard_satisfied(valuation) and b.guard_satisfied(valuation):
                    raise NondeterministicGuards(state, (i, j))


def load_machine(text: str) -> MealyMachine:
    """Parse a `machine.json` document, checking determinism and closure."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError("$", f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise FormatError("$", "top level must be an object")
    for key in doc:
        if key not in ("initial", "states"):
            raise FormatError(f"$.{key}", "unknown field")
    initial = doc.get("initial")
    if not isinstance(initial, int) or isinstance(initial, bool):
        raise FormatError("$.initial", "must be an integer")
    raw_states = doc.get("states")
    if not isinstance(raw_states, list):
        raise FormatError("$.states", "must be a list")

    states: list[int] = []
    transitions: list[Transition] = []
    for si, raw in enumerate(raw_states):
        where = f"$.states[{si}]"
        if not isinstance(raw, dict):
            raise FormatError(where, "must be an object")
        for key in raw:
            if key not in ("id", "transitions"):
                raise FormatError(f"{where}.{key}", "unknown field")
        sid = raw.get("id")
        if not isinstance(sid, int) or isinstance(sid, bool) or sid < 0:
            raise FormatError(f"{where}.id", "must be a non-negative integer")
        if sid in states:
            raise FormatError(f"{where}.id", f"duplicate state id {sid}")
        states.append(sid)
        for ti, rt in enumerate(raw.get("transitions", [])):
            tw = f"{where}.transitions[{ti}]"
            if not isinstance(rt, dict):
                raise FormatError(tw, "must be an object")
            for key in rt:
                if key not in ("guard", "updates", "to"):
                    raise FormatError(f"{tw}.{key}", "unknown field")
            guard = []
            for gi, lit in enumerate(rt.get("guard", [])):
                gw = f"{tw}.guard[{gi}]"
                if not isinstance(lit, dict):
                    raise FormatError(gw, "must be an object")
                for key in lit:
                    if key not in ("pred", "args", "neg"):
                        raise FormatError(f"{gw}.{key}", "unknown field")
                pred = lit.get("pred")
                if not isinstance(pred, str):
                    raise FormatError(f"{gw}.pred", "must be a string")
                args = lit.get("args", [])
                if not isinstance(args, list):
                    raise FormatError(f"{gw}.args", "must be a list")
                try:
                    arg_terms = tuple(parse_term(a) for a in args)
                    term = PredicateTerm(pred, arg_terms)
                except (ParseError, TypeError, ValueError) as e:
                    raise FormatError(gw, f"bad predicate atom: {e}") from e
                neg = lit.get("neg", False)
                if not isinstance(neg, bool):
                    raise FormatError(f"{gw}.neg", "must be a boolean")
                guard.append(GuardLiteral(term, neg))
            updates = []
            raw_updates = rt.get("updates", {})
            if not isinstance(raw_updates, dict):
                raise FormatError(f"{tw}.updates", "must be an object")
            for cell, term_text in raw_updates.items():
                try:
                    updates.append((cell, parse_term(term_text)))
                except (ParseError, TypeError) as e:
                    raise FormatError(f"{tw}.updates.{cell}", str(e)) from e
            target = rt.get("to")
            if not isinstance(target, int) or isinstance(target, bool):
                raise FormatError(f"{tw}.to", "must be an integer")
            transitions.append(Transition(sid, tuple(guard), tuple(updates), target))

    try:
        machine = MealyMachine(tuple(states), initial, tuple(transitions))
    except ValueError as e:
        raise FormatError("$", str(e)) from e
    _check_determinism(machine)
    return machine


def load_machine_file(path) -> MealyMachine:
    with open(path, encoding="utf-8") as fh:
        return load_machine(fh.read())


def _call_syntax(t: FunctionTerm) -> str:
    if isinstance(t, SignalRef):
        return t.name
    return f"{t.function}({', '.join(_call_syntax(a) for a in t.args)})"


def _guard_source(guard: tuple[GuardLiteral, ...]) -> str:
    if not guard:
        return "true"
    parts = []
    for lit in guard:
        call = lit.term.predicate
        if lit.term.args:
            call += f"({', '.join(_call_syntax(a) for a in lit.term.args)})"
        parts.append(("!" if lit.negated else "") + call)
    return " && ".join(parts)


def emit_controller(machine: MealyMachine) -> str:
    """Render the controller as chained `if` blocks over `currentState`.

    Transition order is preserved; terms are rendered in call syntax
    (`moveLeft(ball)`), updates become assignments.
    """
    lines: list[str] = []
    for state in machine.states:
        lines.append(f"if (currentState === {state}) {{")
        for i, t in enumerate(machine.transitions_from(state)):
            kw = "if" if i == 0 else "else if"
            lines.append(f"    {kw} ({_guard_source(t.guard)}) {{")
            for cell, term in t.updates:
                lines.append(f"        {cell} = {_call_syntax(term)}")
            lines.append(f"        currentState = {t.target}")
            lines.append("    }")
        lines.append("}")
    return "\n".join(lines)


def machine_to_json(machine: MealyMachine) -> dict:
    """Inverse of `load_machine`, mainly for diagnostics and tests."""
    from .printer import format_term

    states = []
    for state in machine.states:
        transitions = []
        for t in machine.transitions_from(state):
            transitions.append(
                {
                    "guard": [
                        {
                            "pred": lit.term.predicate,
                            "args": [format_term(a) for a in lit.term.args],
                            "neg": lit.negated,
                        }
                        for lit in t.guard
                    ],
                    "updates": {c: format_term(v) for c, v in t.updates},
                    "to": t.target,
                }
            )
        states.append({"id": state, "transitions": transitions})
    return {"initial": machine.initial, "states": states}


def describe_guard(guard: tuple[GuardLiteral, ...]) -> str:
    if not guard:
        return "true"
    return " && ".join(
        ("!" if lit.negated else "") + format_predicate_term(lit.term)
        for lit in guard
    )
