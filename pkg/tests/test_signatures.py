import json
import random

import pytest

from tslforge import (
    FormatError,
    IssueCode,
    SignatureTable,
    SymbolDecl,
    SymbolKind,
    TslSpec,
    atom_alphabet,
    format_predicate_term,
    format_term,
    parse_signatures,
    parse_spec,
    print_spec,
    validate,
)

from .gen import NAMES, random_spec


def table_without(table, name):
    return SignatureTable(tuple(d for d in table.decls if d.name != name))


class TestParseSignatures:
    def test_ball_table(self, ball_table):
        assert len(ball_table) == 5
        assert ball_table.get("ball").kind == SymbolKind.CELL
        assert ball_table.get("moveLeft").arity == 1
        assert ball_table.get("rightmost").kind == SymbolKind.PREDICATE

    def test_empty_document(self):
        assert len(parse_signatures("{}")) == 0

    def test_duplicate_name_rejected(self):
        doc = {"cells": [{"name": "ball"}, {"name": "ball"}]}
        with pytest.raises(FormatError):
            parse_signatures(json.dumps(doc))

    def test_duplicate_across_kinds_rejected(self):
        doc = {"cells": [{"name": "ball"}], "predicates": [{"name": "ball", "arity": 1}]}
        with pytest.raises(FormatError):
            parse_signatures(json.dumps(doc))

    def test_unknown_top_level_field_rejected(self):
        with pytest.raises(FormatError) as exc:
            parse_signatures('{"cells": [], "extra": 1}')
        assert "extra" in exc.value.path

    def test_unknown_entry_field_rejected(self):
        doc = {"functions": [{"name": "f", "arity": 1, "color": "red"}]}
        with pytest.raises(FormatError):
            parse_signatures(json.dumps(doc))

    def test_cell_arity_field_rejected(self):
        doc = {"cells": [{"name": "ball", "arity": 1}]}
        with pytest.raises(FormatError):
            parse_signatures(json.dumps(doc))

    def test_function_needs_positive_arity(self):
        doc = {"functions": [{"name": "f", "arity": 0}]}
        with pytest.raises(FormatError):
            parse_signatures(json.dumps(doc))

    def test_bad_json(self):
        with pytest.raises(FormatError):
            parse_signatures("not json")


class TestValidate:
    def test_ball_ok(self, ball_spec, ball_table):
        assert validate(ball_spec, ball_table).ok

    def test_missing_function_reported_per_use(self, ball_spec, ball_table):
        report = validate(ball_spec, table_without(ball_table, "moveLeft"))
        unknown = [i for i in report.issues if i.code == IssueCode.UNKNOWN_SYMBOL]
        assert len(unknown) == 4
        assert all("moveLeft" in i.message for i in unknown)
        assert all(i.span is not None for i in unknown)
        # one use sits in the assumptions, three in the guarantees
        assume_only = validate(TslSpec(ball_spec.assumes, ()), table_without(ball_table, "moveLeft"))
        assert len(assume_only.issues) == 1

    def test_arity_mismatch(self, ball_table):
        spec = parse_spec("always guarantee { leftmost ball ball; }")
        report = validate(spec, ball_table)
        assert [i.code for i in report.issues] == [IssueCode.ARITY_MISMATCH]

    def test_kind_mismatch_function_as_predicate(self, ball_table):
        spec = parse_spec("always guarantee { moveLeft ball; }")
        assert [i.code for i in validate(spec, ball_table).issues] == [
            IssueCode.KIND_MISMATCH
        ]

    def test_update_target_must_be_writable(self, ball_table):
        spec = parse_spec("always guarantee { [leftmost <- moveLeft ball]; }")
        codes = [i.code for i in validate(spec, ball_table).issues]
        assert IssueCode.UPDATE_TARGET_NOT_WRITABLE in codes

    def test_output_cannot_be_read(self):
        table = parse_signatures(
            '{"outputs": [{"name": "led"}], "cells": [{"name": "c"}]}'
        )
        ok = parse_spec("always guarantee { [led <- c]; }")
        assert validate(ok, table).ok
        bad = parse_spec("always guarantee { [c <- led]; }")
        assert [i.code for i in validate(bad, table).issues] == [
            IssueCode.READ_OF_NON_READABLE
        ]

    def test_bare_atom_classification(self):
        table = parse_signatures(
            '{"inputs": [{"name": "btn"}], "predicates": [{"name": "pressed", "arity": 1}]}'
        )
        assert validate(parse_spec("always guarantee { btn; }"), table).ok
        report = validate(parse_spec("always guarantee { pressed; }"), table)
        assert [i.code for i in report.issues] == [IssueCode.ARITY_MISMATCH]

    def test_all_issues_reported(self, ball_table):
        spec = parse_spec(
            "always guarantee { mystery ball; leftmost ball ball; [ball <- vanish]; }"
        )
        report = validate(spec, ball_table)
        assert len(report.issues) == 3

    def test_ok_stable_under_round_trip(self, ball_spec, ball_table):
        again = parse_spec(print_spec(ball_spec))
        assert validate(again, ball_table).ok

    def test_monotone_in_table_seeded(self):
        # growing the table can resolve issues but never adds new locations
        rng = random.Random(5)
        kinds = [SymbolKind.CELL, SymbolKind.INPUT, SymbolKind.FUNCTION, SymbolKind.PREDICATE]
        for _ in range(100):
            spec = random_spec(rng, depth=3)
            names = list(dict.fromkeys(NAMES))
            rng.shuffle(names)
            decls = []
            for name in names[: rng.randint(0, len(names))]:
                kind = rng.choice(kinds)
                arity = rng.randint(1, 3) if kind in (SymbolKind.FUNCTION, SymbolKind.PREDICATE) else 0
                decls.append(SymbolDecl(name, kind, arity))
            small = SignatureTable(tuple(decls))
            extra = [
                SymbolDecl(n, SymbolKind.CELL)
                for n in names
                if small.get(n) is None and rng.random() < 0.5
            ]
            big = small.extended(extra)
            small_spans = {
                (i.span.as_tuple() if i.span else None)
                for i in validate(spec, small).issues
            }
            big_spans = {
                (i.span.as_tuple() if i.span else None)
                for i in validate(spec, big).issues
            }
            assert big_spans <= small_spans


class TestAtomAlphabet:
    def test_ball_exact_sets(self, ball_spec, ball_table, ball_alphabet):
        assert [format_predicate_term(p) for p in ball_alphabet.preds] == [
            "leftmost ball",
            "rightmost ball",
        ]
        assert ball_alphabet.cells == ("ball",)
        assert [format_term(t) for t in ball_alphabet.update_terms("ball")] == [
            "ball",
            "moveLeft ball",
            "moveRight ball",
        ]

    def test_no_predicates(self):
        table = parse_signatures('{"cells": [{"name": "c"}]}')
        spec = parse_spec("always guarantee { [c <- c]; }")
        alpha = atom_alphabet(spec, table)
        assert alpha.preds == ()
        assert [format_term(t) for t in alpha.update_terms("c")] == ["c"]

    def test_textually_identical_terms_unify(self, ball_table):
        spec = parse_spec(
            "always assume { leftmost ball; } always guarantee { leftmost ball && leftmost ball; }"
        )
        alpha = atom_alphabet(spec, ball_table)
        assert len(alpha.preds) == 1

    def test_statement_order_irrelevant(self, ball_spec, ball_table, ball_alphabet):
        shuffled = TslSpec(
            tuple(reversed(ball_spec.assumes)), tuple(reversed(ball_spec.guarantees))
        )
        assert atom_alphabet(shuffled, ball_table) == ball_alphabet

    def test_unwritten_declared_cell_gets_self_update(self, ball_table):
        spec = parse_spec("always guarantee { leftmost ball; }")
        alpha = atom_alphabet(spec, ball_table)
        assert [format_term(t) for t in alpha.update_terms("ball")] == ["ball"]

    def test_union(self, ball_spec, ball_table, ball_alphabet):
        partial = atom_alphabet(
            parse_spec("always guarantee { leftmost ball; }"), ball_table
        )
        assert partial.union(ball_alphabet) == ball_alphabet
