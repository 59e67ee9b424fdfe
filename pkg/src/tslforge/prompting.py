"""Prompt assembly and response extraction for specification generation.

A generation prompt concatenates a fixed instruction header with up to three
benchmark-supplied parts: a short problem summary, a detailed description,
and the declared function/predicate signatures.  The variant selects which
parts are included, which is how ablation runs are expressed.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .signatures import SignatureTable, SymbolKind, load_signatures


class PromptVariant(enum.Enum):
    FULL = "full"
    NO_SIGNATURES = "no-sigs"
    SUMMARY_ONLY = "summary-only"

    @classmethod
    def parse(cls, text: str) -> "PromptVariant":
        for v in cls:
            if v.value == text:
                return v
        raise ValueError(f"unknown variant {text!r}; pick one of "
                         f"{', '.join(v.value for v in cls)}")


@dataclass(frozen=True)
class PromptBundle:
    summary: str
    description: str
    signatures: SignatureTable
    benchmark_name: str


class MissingPart(Exception):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"prompt part missing: {which}")


class ExtractionError(Exception):
    """No candidate specification found in a model response."""


def default_instructions() -> str:
    return (
        resources.files("tslforge")
        .joinpath("data/prompt_header.txt")
        .read_text(encoding="utf-8")
    )


def _signature_lines(table: SignatureTable) -> str:
    sections = [
        ("Cells:", SymbolKind.CELL),
        ("Inputs:", SymbolKind.INPUT),
        ("Outputs:", SymbolKind.OUTPUT),
        ("Functions:", SymbolKind.FUNCTION),
        ("Predicates:", SymbolKind.PREDICATE),
    ]
    lines: list[str] = []
    for header, kind in sections:
        decls = table.of_kind(kind)
        if not decls:
            continue
        lines.append(header)
        for d in decls:
            if kind in (SymbolKind.FUNCTION, SymbolKind.PREDICATE):
                args = ", ".join(f"x{i + 1}" for i in range(d.arity))
                lines.append(f"  {d.name}({args}) => {d.description}")
            elif d.description:
                lines.append(f'  "{d.name}" {d.description}')
            else:
                lines.append(f'  "{d.name}"')
    return "\n".join(lines)


def assemble_prompt(
    bundle: PromptBundle, variant: PromptVariant, instructions: str | None = None
) -> str:
    """Deterministic concatenation of the parts a variant requires.

    Byte-identical output for identical inputs; section order is fixed as
    instructions, summary, description, signatures.
    """
    if instructions is None:
        instructions = default_instructions()
    if not bundle.summary.strip():
        raise MissingPart("summary")
    parts = [instructions.rstrip("\n"), bundle.summary.rstrip("\n")]
    if variant in (PromptVariant.FULL, PromptVariant.NO_SIGNATURES):
        if not bundle.description.strip():
            raise MissingPart("description")
        parts.append(bundle.description.rstrip("\n"))
    if variant == PromptVariant.FULL:
        if not len(bundle.signatures):
            raise MissingPart("signatures")
        parts.append(_signature_lines(bundle.signatures))
    return "\n\n".join(parts) + "\n"


_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_BLOCK_START_RE = re.compile(r"always\s+(?:assume|guarantee)")


def extract_spec(response: str) -> str:
    """Pull candidate specification text out of a model response.

    Prefers the first fenced code block; otherwise takes the region starting
    at the first `always assume`/`always guarantee` and extending through all
    consecutive balanced-brace blocks.
    """
    fence = _FENCE_RE.search(response)
    if fence:
        return fence.group(1).strip()
    start_match = _BLOCK_START_RE.search(response)
    if not start_match:
        raise ExtractionError("no fenced code block or specification block found")
    start = start_match.start()
    depth = 0
    end = None
    i = start
    while i < len(response):
        c = response[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                end = i + 1
                rest = response[end:]
                follow = re.match(r"\s*always\s+(?:assume|guarantee)", rest)
                if follow is None:
                    break
        elif depth < 0:
            break
        i += 1
    if end is None:
        raise ExtractionError("specification block never closes")
    return response[start:end].strip()


def load_bundle(path) -> PromptBundle:
    """Read a benchmark bundle directory.

    Layout: `summary.txt`, `description.txt`, `signatures.json` (plus the
    gold specification and an optional machine description, read elsewhere).
    """
    path = Path(path)
    summary = (path / "summary.txt").read_text(encoding="utf-8")
    desc_file = path / "description.txt"
    description = desc_file.read_text(encoding="utf-8") if desc_file.exists() else ""
    table = load_signatures(path / "signatures.json")
    return PromptBundle(summary, description, table, path.name)
