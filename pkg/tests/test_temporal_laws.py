"""Classic temporal-logic identities, checked exhaustively on bounded lassos.

Every law below holds on infinite words, hence on every lasso; a defect in
the loop fixpoint, wrap-around, or prefix propagation of either evaluator
would violate one of them.  Laws are checked through the bit-parallel
engine (`distinguish_formulas`) over all lassos of size <= 3 and
spot-checked through the recursive evaluator.
"""

import random
import zlib

import pytest

from tslforge import (
    And,
    Apply,
    Finally,
    Globally,
    Next,
    Not,
    Or,
    Pred,
    PredicateTerm,
    SignalRef,
    Until,
    Update,
    WeakUntil,
    distinguish_formulas,
    eval_on_lasso,
)
from tslforge.signatures import AtomAlphabet

from .gen import random_formula_over
from .oracles import all_lassos, all_steps

P1 = PredicateTerm("p", ())
P2 = PredicateTerm("q", ())
WRITE = Apply("f", (SignalRef("c"),))
HOLD = SignalRef("c")

ATOMS = [Pred(P1), Pred(P2), Update("c", WRITE), Update("c", HOLD)]
ALPHABET = AtomAlphabet.build([P1, P2], {"c": {WRITE, HOLD}})
STEPS = all_steps([P1, P2], {"c": [HOLD, WRITE]})

LAWS = [
    ("next-over-and", lambda a, b: (Next(And(a, b)), And(Next(a), Next(b)))),
    ("next-over-not", lambda a, b: (Next(Not(a)), Not(Next(a)))),
    ("globally-over-and", lambda a, b: (Globally(And(a, b)), And(Globally(a), Globally(b)))),
    ("finally-over-or", lambda a, b: (Finally(Or(a, b)), Or(Finally(a), Finally(b)))),
    ("globally-dual", lambda a, b: (Not(Globally(a)), Finally(Not(a)))),
    ("finally-dual", lambda a, b: (Not(Finally(a)), Globally(Not(a)))),
    ("finally-idempotent", lambda a, b: (Finally(Finally(a)), Finally(a))),
    ("globally-idempotent", lambda a, b: (Globally(Globally(a)), Globally(a))),
    ("finally-expansion", lambda a, b: (Finally(a), Or(a, Next(Finally(a))))),
    ("globally-expansion", lambda a, b: (Globally(a), And(a, Next(Globally(a))))),
    ("until-expansion", lambda a, b: (Until(a, b), Or(b, And(a, Next(Until(a, b)))))),
    ("weak-until-expansion",
     lambda a, b: (WeakUntil(a, b), Or(b, And(a, Next(WeakUntil(a, b)))))),
    ("until-implies-finally", lambda a, b: (Or(Finally(b), Not(Until(a, b))), _true())),
    ("weak-until-as-until-or-globally",
     lambda a, b: (WeakUntil(a, b), Or(Until(a, b), Globally(a)))),
    ("until-as-weak-until-and-finally",
     lambda a, b: (Until(a, b), And(WeakUntil(a, b), Finally(b)))),
    ("absorption-fgf", lambda a, b: (Finally(Globally(Finally(a))), Globally(Finally(a)))),
    ("absorption-gfg", lambda a, b: (Globally(Finally(Globally(a))), Finally(Globally(a)))),
]


def _true():
    # p || !p: a tautology over an alphabet atom
    return Or(Pred(P1), Not(Pred(P1)))


def _operands(seed: int):
    rng = random.Random(seed)
    return (
        random_formula_over(rng, ATOMS, depth=2),
        random_formula_over(rng, ATOMS, depth=2),
    )


@pytest.mark.parametrize("name,law", LAWS, ids=[name for name, _ in LAWS])
def test_law_holds_on_all_bounded_lassos(name, law):
    for seed in range(12):
        a, b = _operands(1000 * seed + zlib.crc32(name.encode()) % 1000)
        lhs, rhs = law(a, b)
        witness = distinguish_formulas(lhs, rhs, ALPHABET, 3)
        assert witness is None, f"{name} violated with operands seed {seed}"


@pytest.mark.parametrize("name,law", LAWS, ids=[name for name, _ in LAWS])
def test_law_holds_under_recursive_evaluator(name, law):
    rng = random.Random(zlib.crc32(name.encode()) % 10_000)
    lassos = list(all_lassos(STEPS, 2))
    for seed in range(3):
        a, b = _operands(seed)
        lhs, rhs = law(a, b)
        for trace in rng.sample(lassos, 40):
            for pos in range(len(trace)):
                assert eval_on_lasso(lhs, trace, pos) == eval_on_lasso(rhs, trace, pos), name
