import json
from pathlib import Path

import pytest

from tslforge import (
    atom_alphabet,
    load_machine_file,
    load_signatures,
    parse_spec,
)

ROOT = Path(__file__).resolve().parents[1]
BENCHMARKS = ROOT / "benchmarks"
BALL = BENCHMARKS / "ball"

# Guarantees 1 and 2 swap their update directions; still valid, not correct.
MUTANT_BALL = """always assume {
    [ball <- moveLeft ball] -> X (! rightmost ball);
    [ball <- moveRight ball] -> X (! leftmost ball);
    ! (leftmost ball && rightmost ball);
}
always guarantee {
    rightmost ball -> F [ball <- moveRight ball ];
    leftmost ball -> F [ball <- moveLeft ball ];
    (! leftmost ball && ! rightmost ball ) ->
        F ([ball <- moveLeft ball ] || [ball <- moveRight ball ]);
    (leftmost ball && X (!leftmost ball)) -> ((! [ball <- moveLeft ball]) W rightmost ball);
    (rightmost ball && X (!rightmost ball)) -> ((! [ball <- moveRight ball]) W leftmost ball);
}
"""

PROSE_ONLY = "I cannot help with that."

CONTROLLER_STATE0 = """if (currentState === 0) {
    if (!leftmost(ball) && rightmost(ball)) {
        ball = moveLeft(ball)
        currentState = 1
    }
    else if (!leftmost(ball) && !rightmost(ball)) {
        ball = moveLeft(ball)
        currentState = 1
    }
    else if (leftmost(ball) && !rightmost(ball)) {
        ball = moveRight(ball)
        currentState = 2
    }
}"""


@pytest.fixture(scope="session")
def ball_text():
    return (BALL / "gold.tsl").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def ball_spec(ball_text):
    return parse_spec(ball_text)


@pytest.fixture(scope="session")
def ball_table():
    return load_signatures(BALL / "signatures.json")


@pytest.fixture(scope="session")
def ball_alphabet(ball_spec, ball_table):
    return atom_alphabet(ball_spec, ball_table)


@pytest.fixture(scope="session")
def bounce_machine():
    return load_machine_file(BALL / "machine.json")


@pytest.fixture()
def bounce_machine_doc():
    return json.loads((BALL / "machine.json").read_text(encoding="utf-8"))


def fenced(text: str) -> str:
    return f"Here is the specification you asked for:\n\n```\n{text}\n```\nGood luck!"
