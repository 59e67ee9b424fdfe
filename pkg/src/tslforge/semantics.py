"""Trace semantics over ultimately-periodic (lasso) traces.

A lasso finitely represents an infinite abstract trace: a prefix of steps
followed by a repeating loop.  Each step fixes every predicate atom and
chooses exactly one update term per writable signal.  On top of single-trace
evaluation this module provides exhaustive bounded equivalence between
specifications and conformance checking of Mealy machines, both enumerating
every lasso up to a size bound in a fixed, reproducible order (prefix length
ascending, then loop length, then steps lexicographically with the first
position most significant).

Enumeration is evaluated bit-parallel: one arbitrary-precision integer per
(subformula, position) holds the truth value across all lassos of a shape,
so boolean connectives become single bitwise operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Union

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
    PredicateTerm,
    SignalRef,
    TslSpec,
    Until,
    Update,
    WeakUntil,
)
from .machines import MealyMachine
from .parser import parse_predicate_term, parse_term
from .printer import format_predicate_term, format_term
from .signatures import AtomAlphabet, spec_alphabet

DEFAULT_LASSO_CAP = 10_000_000
_CHUNK_BITS = 1 << 16


class UnknownAtom(Exception):
    """A formula mentions an atom outside the trace or alphabet."""


class BudgetExceeded(Exception):
    """The requested enumeration is larger than the configured cap."""

    def __init__(self, needed: int, cap: int):
        self.needed = needed
        self.cap = cap
        super().__init__(f"enumeration needs {needed} lassos, cap is {cap}")


@dataclass(frozen=True)
class AbstractStep:
    """One trace step: a valuation of predicate atoms plus the chosen update
    term for each written signal.  Signals absent from `updates` hold their
    value (implicit self-update)."""

    pred_vals: dict[PredicateTerm, bool]
    updates: dict[str, FunctionTerm]


@dataclass(frozen=True)
class LassoTrace:
    prefix: tuple[AbstractStep, ...]
    loop: tuple[AbstractStep, ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise ValueError("lasso loop must be non-empty")

    def __len__(self) -> int:
        return len(self.prefix) + len(self.loop)

    def step(self, position: int) -> AbstractStep:
        p = len(self.prefix)
        if position < p:
            return self.prefix[position]
        return self.loop[(position - p) % len(self.loop)]

    def canonical(self, position: int) -> int:
        p, n = len(self.prefix), len(self)
        return position if position < n else p + (position - p) % len(self.loop)


def _step_to_json(step: AbstractStep) -> dict:
    return {
        "preds": {format_predicate_term(t): v for t, v in step.pred_vals.items()},
        "updates": {c: format_term(t) for c, t in step.updates.items()},
    }


def _step_from_json(doc: dict) -> AbstractStep:
    preds = {parse_predicate_term(k): bool(v) for k, v in doc.get("preds", {}).items()}
    updates = {c: parse_term(t) for c, t in doc.get("updates", {}).items()}
    return AbstractStep(preds, updates)


def trace_to_json(trace: LassoTrace) -> dict:
    return {
        "prefix": [_step_to_json(s) for s in trace.prefix],
        "loop": [_step_to_json(s) for s in trace.loop],
    }


def trace_from_json(doc: dict) -> LassoTrace:
    return LassoTrace(
        tuple(_step_from_json(s) for s in doc.get("prefix", [])),
        tuple(_step_from_json(s) for s in doc.get("loop", [])),
    )


# -- single-trace evaluation -------------------------------------------------


def eval_on_lasso(f: Formula, trace: LassoTrace, position: int = 0) -> bool:
    """Exact infinite-word evaluation of `f` at `position` of the trace.

    Temporal operators scan at most one full revolution of the loop beyond
    the prefix; (subformula, position) results are memoized.
    """
    p, n = len(trace.prefix), len(trace)
    loop_len = len(trace.loop)
    if not 0 <= position < n:
        raise ValueError(f"position {position} outside the lasso (length {n})")

    memo: dict[tuple[int, int], bool] = {}

    def canon(i: int) -> int:
        return i if i < n else p + (i - p) % loop_len

    def horizon(i: int) -> int:
        # last index (exclusive) after which canonical positions repeat
        return n if i < p else i + loop_len

    def ev(g: Formula, i: int) -> bool:
        key = (id(g), i)
        if key in memo:
            return memo[key]
        result = _ev(g, i)
        memo[key] = result
        return result

    def _ev(g: Formula, i: int) -> bool:
        step = trace.step(i)
        if isinstance(g, Pred):
            if g.term not in step.pred_vals:
                raise UnknownAtom(
                    f"predicate atom '{format_predicate_term(g.term)}' not in trace"
                )
            return step.pred_vals[g.term]
        if isinstance(g, Update):
            chosen = step.updates.get(g.target, SignalRef(g.target))
            return chosen == g.value
        if isinstance(g, Not):
            return not ev(g.operand, i)
        if isinstance(g, And):
            return ev(g.left, i) and ev(g.right, i)
        if isinstance(g, Or):
            return ev(g.left, i) or ev(g.right, i)
        if isinstance(g, Implies):
            return (not ev(g.left, i)) or ev(g.right, i)
        if isinstance(g, Next):
            return ev(g.operand, canon(i + 1))
        if isinstance(g, Finally):
            return any(ev(g.operand, canon(j)) for j in range(i, horizon(i)))
        if isinstance(g, Globally):
            return all(ev(g.operand, canon(j)) for j in range(i, horizon(i)))
        if isinstance(g, (Until, WeakUntil)):
            for j in range(i, horizon(i)):
                c = canon(j)
                if ev(g.right, c):
                    return True
                if not ev(g.left, c):
                    return False
            return isinstance(g, WeakUntil)
        raise TypeError(f"not a formula: {g!r}")

    return ev(f, position)


def _fold_and(formulas: Iterable[Formula]) -> Formula | None:
    acc: Formula | None = None
    for f in formulas:
        acc = f if acc is None else And(acc, f)
    return acc


def composed_formula(spec: TslSpec) -> Formula | None:
    """`G(all assumptions) -> G(all guarantees)`; None means trivially true."""
    assumes = _fold_and(spec.assumes)
    guarantees = _fold_and(spec.guarantees)
    if guarantees is None:
        return None
    if assumes is None:
        return Globally(guarantees)
    return Implies(Globally(assumes), Globally(guarantees))


def spec_holds(spec: TslSpec, trace: LassoTrace) -> bool:
    """Block semantics of a specification on one trace."""
    f = composed_formula(spec)
    return True if f is None else eval_on_lasso(f, trace, 0)


# -- bit-parallel evaluation over all lassos of one shape ---------------------


class _StepSpace:
    """Indexing of the abstract step space of an alphabet.

    Steps are numbered 0..S-1: predicate bits form the high part (first
    predicate most significant), update choices the low part (first cell most
    significant), so numeric order is lexicographic atom order.
    """

    def __init__(self, alphabet: AtomAlphabet):
        self.alphabet = alphabet
        self.preds = alphabet.preds
        self.pred_index = {t: i for i, t in enumerate(self.preds)}
        self.cells = [(c, terms) for c, terms in alphabet.updates]
        self.term_index = {
            (c, t): i for c, terms in self.cells for i, t in enumerate(terms)
        }
        self.upd_count = 1
        for _, terms in self.cells:
            self.upd_count *= len(terms)
        self.steps = (1 << len(self.preds)) * self.upd_count
        # block size of each cell's digit inside the update part
        self._cell_block = []
        block = self.upd_count
        for _, terms in self.cells:
            block //= len(terms)
            self._cell_block.append(block)

    def pred_atom(self, term: PredicateTerm) -> tuple[int, int, int]:
        """(block, radix, value) digit test for a predicate atom."""
        if term not in self.pred_index:
            raise UnknownAtom(
                f"predicate atom '{format_predicate_term(term)}' not in alphabet"
            )
        i = self.pred_index[term]
        block = self.upd_count << (len(self.preds) - 1 - i)
        return block, 2, 1

    def update_atom(self, cell: str, value: FunctionTerm) -> tuple[int, int, int]:
        """(block, radix, value) digit test for an update atom."""
        key = (cell, value)
        if key not in self.term_index:
            raise UnknownAtom(
                f"update atom '[{cell} <- {format_term(value)}]' not in alphabet"
            )
        for j, (c, terms) in enumerate(self.cells):
            if c == cell:
                return self._cell_block[j], len(terms), self.term_index[key]
        raise UnknownAtom(f"cell '{cell}' not in alphabet")

    def decode_step(self, s: int) -> AbstractStep:
        pred_part, upd_part = divmod(s, self.upd_count)
        preds = {
            t: bool((pred_part >> (len(self.preds) - 1 - i)) & 1)
            for i, t in enumerate(self.preds)
        }
        updates = {}
        for j, (c, terms) in enumerate(self.cells):
            digit = (upd_part // self._cell_block[j]) % len(terms)
            updates[c] = terms[digit]
        return AbstractStep(preds, updates)

    def decode_trace(self, index: int, prefix_len: int, loop_len: int) -> LassoTrace:
        n = prefix_len + loop_len
        digits = []
        for pos in range(n):
            digits.append((index // self.steps ** (n - 1 - pos)) % self.steps)
        steps = [self.decode_step(d) for d in digits]
        return LassoTrace(tuple(steps[:prefix_len]), tuple(steps[prefix_len:]))


_TRUE = ("true",)


class _NodePool:
    """Hash-consed compilation of formulas to flat (op, args) nodes."""

    def __init__(self, space: _StepSpace):
        self.space = space
        self.nodes: list[tuple] = []
        self._ids: dict[tuple, int] = {}

    def _intern(self, node: tuple) -> int:
        nid = self._ids.get(node)
        if nid is None:
            nid = len(self.nodes)
            self.nodes.append(node)
            self._ids[node] = nid
        return nid

    def true_id(self) -> int:
        return self._intern(_TRUE)

    def add(self, f: Formula) -> int:
        if isinstance(f, Pred):
            return self._intern(("pred",) + self.space.pred_atom(f.term))
        if isinstance(f, Update):
            return self._intern(("upd",) + self.space.update_atom(f.target, f.value))
        if isinstance(f, Not):
            return self._intern(("not", self.add(f.operand)))
        if isinstance(f, And):
            return self._intern(("and", self.add(f.left), self.add(f.right)))
        if isinstance(f, Or):
            return self._intern(("or", self.add(f.left), self.add(f.right)))
        if isinstance(f, Implies):
            return self._intern(("imp", self.add(f.left), self.add(f.right)))
        if isinstance(f, Next):
            return self._intern(("next", self.add(f.operand)))
        if isinstance(f, Until):
            return self._intern(("until", self.add(f.left), self.add(f.right)))
        if isinstance(f, WeakUntil):
            return self._intern(("wuntil", self.add(f.left), self.add(f.right)))
        if isinstance(f, Finally):
            return self._intern(("fin", self.add(f.operand)))
        if isinstance(f, Globally):
            return self._intern(("glob", self.add(f.operand)))
        raise TypeError(f"not a formula: {f!r}")


def _periodic_mask(block: int, radix: int, value: int, width: int) -> int:
    """Bits b in [0, width) with (b // block) % radix == value."""
    period = block * radix
    if period >= width:
        lo = value * block
        hi = min(width, lo + block)
        return ((1 << (hi - lo)) - 1) << lo if hi > lo else 0
    count = width // period
    rep = ((1 << (period * count)) - 1) // ((1 << period) - 1)
    return (((1 << block) - 1) << (value * block)) * rep


def _until_vectors(va: list[int], vb: list[int], p: int, n: int) -> list[int]:
    """Least fixpoint of u = b | (a & X u) over the lasso positions."""
    u = [0] * n
    # loop part: sweep until stable (bounded by loop length + 1 passes)
    for _ in range(n - p + 1):
        changed = False
        for i in range(n - 1, p - 1, -1):
            nxt = i + 1 if i + 1 < n else p
            v = vb[i] | (va[i] & u[nxt])
            if v != u[i]:
                u[i] = v
                changed = True
        if not changed:
            break
    for i in range(p - 1, -1, -1):
        u[i] = vb[i] | (va[i] & u[i + 1])
    return u


def _globally_vectors(va: list[int], p: int, n: int, full: int) -> list[int]:
    g_loop = full
    for i in range(p, n):
        g_loop &= va[i]
    v = [0] * n
    for i in range(p, n):
        v[i] = g_loop
    for i in range(p - 1, -1, -1):
        v[i] = va[i] & v[i + 1]
    return v


def _finally_vectors(va: list[int], p: int, n: int) -> list[int]:
    f_loop = 0
    for i in range(p, n):
        f_loop |= va[i]
    v = [0] * n
    for i in range(p, n):
        v[i] = f_loop
    for i in range(p - 1, -1, -1):
        v[i] = va[i] | v[i + 1]
    return v


def _eval_pool(
    pool: _NodePool,
    p: int,
    l: int,
    fixed: tuple[int, ...],
    width: int,
) -> list[list[int]]:
    """Evaluate every node at every position, bit-parallel over one chunk.

    `fixed` pins the leading positions' step values; the remaining positions
    range over all steps, the last position varying fastest.
    """
    n = p + l
    m = len(fixed)
    S = pool.space.steps
    full = (1 << width) - 1
    vals: list[list[int]] = []
    for node in pool.nodes:
        op = node[0]
        if op == "true":
            vals.append([full] * n)
        elif op in ("pred", "upd"):
            _, block, radix, value = node
            vec = []
            for pos in range(n):
                if pos < m:
                    truth = (fixed[pos] // block) % radix == value
                    vec.append(full if truth else 0)
                else:
                    eff_block = S ** (n - 1 - pos) * block
                    vec.append(_periodic_mask(eff_block, radix, value, width))
            vals.append(vec)
        elif op == "not":
            a = vals[node[1]]
            vals.append([~a[i] & full for i in range(n)])
        elif op == "and":
            a, b = vals[node[1]], vals[node[2]]
            vals.append([a[i] & b[i] for i in range(n)])
        elif op == "or":
            a, b = vals[node[1]], vals[node[2]]
            vals.append([a[i] | b[i] for i in range(n)])
        elif op == "imp":
            a, b = vals[node[1]], vals[node[2]]
            vals.append([(~a[i] & full) | b[i] for i in range(n)])
        elif op == "next":
            a = vals[node[1]]
            vals.append([a[i + 1 if i + 1 < n else p] for i in range(n)])
        elif op == "until":
            vals.append(_until_vectors(vals[node[1]], vals[node[2]], p, n))
        elif op == "fin":
            vals.append(_finally_vectors(vals[node[1]], p, n))
        elif op == "glob":
            vals.append(_globally_vectors(vals[node[1]], p, n, full))
        elif op == "wuntil":
            u = _until_vectors(vals[node[1]], vals[node[2]], p, n)
            g = _globally_vectors(vals[node[1]], p, n, full)
            vals.append([u[i] | g[i] for i in range(n)])
        else:
            raise AssertionError(f"unknown op {op}")
    return vals


def _chunks(S: int, n: int):
    """Chunked lexicographic enumeration of step assignments.

    Yields (base_index, fixed_digits, width); within a chunk, bit b stands
    for assignment base_index + b.
    """
    total = S ** n
    if total <= _CHUNK_BITS:
        yield 0, (), total
        return
    free = n
    while S ** free > _CHUNK_BITS and free > 1:
        free -= 1
    width = S ** free
    for i, fixed in enumerate(product(range(S), repeat=n - free)):
        yield i * width, fixed, width


def _first_difference(
    pool: _NodePool, root_a: int, root_b: int, k: int
) -> tuple[LassoTrace, str] | None:
    """Earliest lasso (in enumeration order) where the two roots disagree."""
    space = pool.space
    for p in range(0, k):
        for l in range(1, k - p + 1):
            for base, fixed, width in _chunks(space.steps, p + l):
                vals = _eval_pool(pool, p, l, fixed, width)
                diff = vals[root_a][0] ^ vals[root_b][0]
                if diff:
                    bit = (diff & -diff).bit_length() - 1
                    index = base + bit
                    side = "a" if (vals[root_a][0] >> bit) & 1 else "b"
                    return space.decode_trace(index, p, l), side
    return None


def count_lassos(steps: int, k: int) -> int:
    """Number of (prefix, loop) shapes times assignments for bound k."""
    total = 0
    for p in range(0, k):
        for l in range(1, k - p + 1):
            total += steps ** (p + l)
    return total


# -- bounded equivalence ------------------------------------------------------


@dataclass(frozen=True)
class EquivalentUpTo:
    bound: int

    def to_json(self) -> dict:
        return {"type": "equivalent_up_to", "k": self.bound}


@dataclass(frozen=True)
class Counterexample:
    trace: LassoTrace
    holds_in: str  # "a" or "b"

    def to_json(self) -> dict:
        return {
            "type": "counterexample",
            "holds_in": self.holds_in,
            "trace": trace_to_json(self.trace),
        }


EquivVerdict = Union[EquivalentUpTo, Counterexample]


def verdict_from_json(doc: dict) -> EquivVerdict:
    if doc["type"] == "equivalent_up_to":
        return EquivalentUpTo(doc["k"])
    return Counterexample(trace_from_json(doc["trace"]), doc["holds_in"])


def bounded_equiv(
    a: TslSpec,
    b: TslSpec,
    alphabet: AtomAlphabet,
    k: int,
    cap: int = DEFAULT_LASSO_CAP,
) -> EquivVerdict:
    """Exhaustively compare two specifications on every lasso of size <= k.

    Returns the first distinguishing lasso in enumeration order, else
    `EquivalentUpTo(k)`.  Raises BudgetExceeded when the alphabet/bound
    combination would enumerate more than `cap` lassos.
    """
    space = _StepSpace(alphabet)
    needed = count_lassos(space.steps, k)
    if needed > cap:
        raise BudgetExceeded(needed, cap)
    pool = _NodePool(space)
    fa = composed_formula(a)
    fb = composed_formula(b)
    root_a = pool.true_id() if fa is None else pool.add(fa)
    root_b = pool.true_id() if fb is None else pool.add(fb)
    found = _first_difference(pool, root_a, root_b, k)
    if found is None:
        return EquivalentUpTo(k)
    trace, side = found
    return Counterexample(trace, side)


def distinguish_formulas(
    a: Formula,
    b: Formula,
    alphabet: AtomAlphabet,
    k: int,
    cap: int = DEFAULT_LASSO_CAP,
) -> LassoTrace | None:
    """First lasso where raw formulas `a` and `b` differ at position 0."""
    space = _StepSpace(alphabet)
    needed = count_lassos(space.steps, k)
    if needed > cap:
        raise BudgetExceeded(needed, cap)
    pool = _NodePool(space)
    found = _first_difference(pool, pool.add(a), pool.add(b), k)
    return None if found is None else found[0]


# -- machine conformance ------------------------------------------------------


@dataclass(frozen=True)
class Conforms:
    bound: int
    unclosed_skipped: int = 0

    def to_json(self) -> dict:
        return {
            "type": "conforms",
            "k": self.bound,
            "unclosed_skipped": self.unclosed_skipped,
        }


@dataclass(frozen=True)
class Nonconformance:
    trace: LassoTrace

    def to_json(self) -> dict:
        return {"type": "nonconformance", "trace": trace_to_json(self.trace)}


ConformanceVerdict = Union[Conforms, Nonconformance]


class IncompleteMachine(Exception):
    """The machine has no transition for a reachable, assumption-consistent
    predicate valuation."""

    def __init__(self, state: int, valuation: dict[PredicateTerm, bool]):
        self.state = state
        self.valuation = valuation
        shown = {format_predicate_term(t): v for t, v in valuation.items()}
        super().__init__(f"state {state} has no transition for {shown}")


def _decode_valuation(
    index: int, preds: tuple[PredicateTerm, ...]
) -> dict[PredicateTerm, bool]:
    return {
        t: bool((index >> (len(preds) - 1 - i)) & 1) for i, t in enumerate(preds)
    }


class _ConsistencyChecker:
    """Can some choice of updates make the assumptions hold on a valuation
    lasso?  Used to excuse machine incompleteness on impossible inputs."""

    def __init__(self, spec: TslSpec, alphabet: AtomAlphabet, cap: int):
        assumes = _fold_and(spec.assumes)
        self.formula = None if assumes is None else Globally(assumes)
        self.alphabet = alphabet
        self.cap = cap
        self.cells = list(alphabet.updates)

    def consistent(
        self, valuations: list[dict[PredicateTerm, bool]], prefix_len: int
    ) -> bool:
        if self.formula is None:
            return True
        n = len(valuations)
        per_step = []
        for _, terms in self.cells:
            per_step.append(terms)
        combos = 1
        for terms in per_step:
            combos *= len(terms)
        if combos ** n > self.cap:
            return True  # too large to refute; treat as consistent
        names = [c for c, _ in self.cells]
        step_choices = list(product(*per_step)) if per_step else [()]
        for assignment in product(step_choices, repeat=n):
            steps = [
                AbstractStep(valuations[i], dict(zip(names, assignment[i])))
                for i in range(n)
            ]
            trace = LassoTrace(tuple(steps[:prefix_len]), tuple(steps[prefix_len:]))
            if eval_on_lasso(self.formula, trace, 0):
                return True
        return False


def check_machine(
    machine: MealyMachine,
    spec: TslSpec,
    k: int,
    alphabet: AtomAlphabet | None = None,
    closure_factor: int | None = None,
    cap: int = DEFAULT_LASSO_CAP,
    consistency_cap: int = 200_000,
) -> ConformanceVerdict:
    """Drive the machine with every predicate-valuation lasso of size <= k.

    The machine's update choices complete each valuation lasso into a full
    trace; closing the lasso requires the machine state to repeat at a loop
    boundary, so loops are unrolled up to `closure_factor` repetitions
    (default: one more than the state count, which always suffices) and
    otherwise counted as skipped.  Returns the first trace falsifying the
    specification, else Conforms.  Raises IncompleteMachine when a reachable
    valuation consistent with the assumptions has no transition.
    """
    if alphabet is None:
        alphabet = spec_alphabet(spec)
    preds = alphabet.preds
    for atom in machine.guard_atoms():
        if atom not in preds:
            raise UnknownAtom(
                f"machine guard atom '{format_predicate_term(atom)}' "
                "not in the specification alphabet"
            )
    known_updates = {cell: set(terms) for cell, terms in alphabet.updates}
    for t in machine.transitions:
        for cell, term in t.updates:
            if term not in known_updates.get(cell, set()):
                raise UnknownAtom(
                    f"machine update '[{cell} <- {format_term(term)}]' "
                    "not in the specification alphabet"
                )
    val_count = 1 << len(preds)
    needed = count_lassos(val_count, k)
    if needed > cap:
        raise BudgetExceeded(needed, cap)
    if closure_factor is None:
        closure_factor = len(machine.states) + 1
    checker = _ConsistencyChecker(spec, alphabet, consistency_cap)
    cells = alphabet.cells
    unclosed = 0

    def complete_updates(t_updates: dict[str, FunctionTerm]) -> dict[str, FunctionTerm]:
        return {c: t_updates.get(c, SignalRef(c)) for c in cells}

    for p in range(0, k):
        for l in range(1, k - p + 1):
            n = p + l
            for assignment in product(range(val_count), repeat=n):
                valuations = [_decode_valuation(v, preds) for v in assignment]

                def drive(state: int, vals) -> tuple[int, list] | None:
                    out = []
                    for v in vals:
                        trans = machine.step(state, v)
                        if trans is None:
                            if checker.consistent(valuations, p):
                                raise IncompleteMachine(state, v)
                            return None
                        out.append(complete_updates(trans.updates_map()))
                        state = trans.target
                    return state, out

                res = drive(machine.initial, valuations[:p])
                if res is None:
                    continue
                state, prefix_updates = res
                seen = {state: 0}
                passes: list[list] = []
                closed_at = None
                while len(passes) < closure_factor:
                    res = drive(state, valuations[p:])
                    if res is None:
                        break
                    state, pass_updates = res
                    passes.append(pass_updates)
                    if state in seen:
                        closed_at = (seen[state], len(passes))
                        break
                    seen[state] = len(passes)
                if res is None:
                    continue
                if closed_at is None:
                    unclosed += 1
                    continue
                i0, j0 = closed_at
                prefix_steps = [
                    AbstractStep(valuations[i], prefix_updates[i]) for i in range(p)
                ]
                for rep in range(i0):
                    prefix_steps.extend(
                        AbstractStep(valuations[p + i], passes[rep][i])
                        for i in range(l)
                    )
                loop_steps = []
                for rep in range(i0, j0):
                    loop_steps.extend(
                        AbstractStep(valuations[p + i], passes[rep][i])
                        for i in range(l)
                    )
                trace = LassoTrace(tuple(prefix_steps), tuple(loop_steps))
                if not spec_holds(spec, trace):
                    return Nonconformance(trace)
    return Conforms(k, unclosed)
