import pytest
import hypothesis.strategies as st
from hypothesis import given

from tslforge import (
    And,
    Apply,
    Finally,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    ParseError,
    Pred,
    PredicateTerm,
    SignalRef,
    TslSpec,
    Until,
    Update,
    WeakUntil,
    parse_formula,
    parse_spec,
    parse_term,
)
from tslforge.formulas import walk_spec


class TestSpecParsing:
    def test_ball_block_counts(self, ball_spec):
        assert len(ball_spec.assumes) == 3
        assert len(ball_spec.guarantees) == 5

    def test_single_guarantee_block(self):
        spec = parse_spec(
            "always guarantee { rightmost ball -> F [ball <- moveLeft ball]; }"
        )
        assert spec.assumes == ()
        (g,) = spec.guarantees
        expected = Implies(
            Pred(PredicateTerm("rightmost", (SignalRef("ball"),))),
            Finally(Update("ball", Apply("moveLeft", (SignalRef("ball"),)))),
        )
        assert g == expected

    def test_empty_blocks(self):
        assert parse_spec("always assume {} always guarantee {}") == TslSpec((), ())

    def test_missing_term_position(self):
        with pytest.raises(ParseError) as exc:
            parse_spec("always guarantee { [ball <- ]; }")
        assert exc.value.found == "']'"
        assert exc.value.line == 1
        assert exc.value.column == 29

    def test_repeated_blocks_append(self):
        spec = parse_spec("always assume { p; } always assume { q; }")
        assert [f.term.predicate for f in spec.assumes] == ["p", "q"]

    def test_comments_ignored(self):
        spec = parse_spec("// header\nalways guarantee { p; // inline\n }")
        assert len(spec.guarantees) == 1

    def test_garbage_is_parse_error_not_crash(self):
        for text in ["always", "always assume {", "always assume { p }", "{}", "@", "always assume { p;; }"]:
            with pytest.raises(ParseError):
                parse_spec(text)

    @given(st.text(max_size=120))
    def test_arbitrary_text_never_crashes(self, text):
        try:
            parse_spec(text)
        except ParseError as e:
            assert e.line >= 1 and e.column >= 1
            assert e.expected and e.found

    @given(st.text(alphabet="always sumegrnt{}[]()<-;!&|XFGUW ->pqr\n", max_size=80))
    def test_near_miss_text_never_crashes(self, text):
        try:
            parse_spec(text)
        except ParseError:
            pass


class TestPrecedence:
    def test_implies_binds_loosest_and_right_assoc(self):
        f = parse_formula("p -> q -> r")
        assert isinstance(f, Implies)
        assert isinstance(f.right, Implies)

    def test_or_over_and(self):
        f = parse_formula("p && q || r")
        assert isinstance(f, Or)
        assert isinstance(f.left, And)

    def test_until_tighter_than_and(self):
        f = parse_formula("p U q && r")
        assert isinstance(f, And)
        assert isinstance(f.left, Until)

    def test_until_right_assoc_and_mixed_with_weak(self):
        f = parse_formula("p U q W r")
        assert isinstance(f, Until)
        assert isinstance(f.right, WeakUntil)

    def test_unary_tightest(self):
        f = parse_formula("! p && X q")
        assert isinstance(f, And)
        assert isinstance(f.left, Not)
        assert isinstance(f.right, Next)

    def test_unary_stacking(self):
        f = parse_formula("G F p")
        assert isinstance(f, Globally)
        assert isinstance(f.operand, Finally)

    def test_parenthesized_grouping(self):
        f = parse_formula("p && (q || r)")
        assert isinstance(f, And)
        assert isinstance(f.right, Or)


class TestTerms:
    def test_juxtaposition(self):
        assert parse_term("moveLeft ball") == Apply("moveLeft", (SignalRef("ball"),))

    def test_nested_needs_parens(self):
        t = parse_term("moveLeft (moveRight ball)")
        assert t == Apply("moveLeft", (Apply("moveRight", (SignalRef("ball"),)),))

    def test_multi_arg(self):
        t = parse_term("addCoin balance coin")
        assert t == Apply("addCoin", (SignalRef("balance"), SignalRef("coin")))

    def test_bare_identifier_formula_is_zero_arity_pred(self):
        f = parse_formula("ready")
        assert f == Pred(PredicateTerm("ready", ()))


class TestSpans:
    def test_every_node_has_a_span(self, ball_spec):
        for node in walk_spec(ball_spec):
            assert node.span is not None

    def test_span_locations_are_ordered(self, ball_spec):
        spans = [n.span for n in walk_spec(ball_spec)]
        for s in spans:
            assert (s.end_line, s.end_column) >= (s.line, s.column)

    def test_update_span_points_at_brackets(self):
        spec = parse_spec("always assume {\n    [ball <- moveLeft ball];\n}")
        upd = spec.assumes[0]
        assert (upd.span.line, upd.span.column) == (2, 5)
