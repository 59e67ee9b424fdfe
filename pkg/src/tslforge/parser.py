"""Lexer and recursive-descent parser for the block specification syntax.

Grammar, loosest binding first: `->` (right), `||`, `&&`, `U`/`W` (right),
then the unary operators `!`, `X`, `F`, `G`.  Function application is
juxtaposition (`moveLeft ball`); nested applications need parentheses.
`//` starts a line comment; every formula in a block ends with `;`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    And,
    Apply,
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
    Span,
    TslSpec,
    Until,
    Update,
    WeakUntil,
)


class ParseError(Exception):
    """Raised on any malformed input; carries the offending position."""

    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found}")


_KEYWORDS = {
    "always": "ALWAYS",
    "assume": "ASSUME",
    "guarantee": "GUARANTEE",
    "X": "NEXT",
    "F": "FINALLY",
    "G": "GLOBALLY",
    "U": "UNTIL",
    "W": "WEAKUNTIL",
}

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACK",
    "]": "RBRACK",
    ";": "SEMI",
    "!": "NOT",
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    @property
    def end_column(self) -> int:
        return self.column + len(self.text)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            tokens.append(Token(_KEYWORDS.get(word, "IDENT"), word, line, col))
            col += j - i
            i = j
            continue
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        two = source[i : i + 2]
        if two in ("->", "<-", "&&", "||"):
            kind = {"->": "ARROW", "<-": "LARROW", "&&": "AND", "||": "OR"}[two]
            tokens.append(Token(kind, two, line, col))
            i += 2
            col += 2
            continue
        raise ParseError(line, col, "a token", repr(c))
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(expected)
        return self.advance()

    def fail(self, expected: str) -> None:
        tok = self.peek()
        found = repr(tok.text) if tok.kind != "EOF" else "end of input"
        raise ParseError(tok.line, tok.column, expected, found)

    @staticmethod
    def _span(start: Token, end: Token) -> Span:
        return Span(start.line, start.column, end.line, end.end_column)

    def _prev(self) -> Token:
        return self.tokens[self.pos - 1]

    # -- specification -------------------------------------------------

    def spec(self) -> TslSpec:
        assumes: list[Formula] = []
        guarantees: list[Formula] = []
        while self.peek().kind != "EOF":
            self.expect("ALWAYS", "'always'")
            tok = self.peek()
            if tok.kind == "ASSUME":
                target = assumes
            elif tok.kind == "GUARANTEE":
                target = guarantees
            else:
                self.fail("'assume' or 'guarantee'")
            self.advance()
            self.expect("LBRACE", "'{'")
            while self.peek().kind != "RBRACE":
                target.append(self.formula())
                self.expect("SEMI", "';'")
            self.advance()
        return TslSpec(tuple(assumes), tuple(guarantees))

    # -- formulas ------------------------------------------------------

    def formula(self) -> Formula:
        return self.implies()

    def implies(self) -> Formula:
        start = self.peek()
        lhs = self.or_()
        if self.peek().kind == "ARROW":
            self.advance()
            rhs = self.implies()
            return Implies(lhs, rhs, self._span(start, self._prev()))
        return lhs

    def or_(self) -> Formula:
        start = self.peek()
        lhs = self.and_()
        while self.peek().kind == "OR":
            self.advance()
            rhs = self.and_()
            lhs = Or(lhs, rhs, self._span(start, self._prev()))
        return lhs

    def and_(self) -> Formula:
        start = self.peek()
        lhs = self.until()
        while self.peek().kind == "AND":
            self.advance()
            rhs = self.until()
            lhs = And(lhs, rhs, self._span(start, self._prev()))
        return lhs

    def until(self) -> Formula:
        start = self.peek()
        lhs = self.unary()
        kind = self.peek().kind
        if kind in ("UNTIL", "WEAKUNTIL"):
            self.advance()
            rhs = self.until()
            node = Until if kind == "UNTIL" else WeakUntil
            return node(lhs, rhs, self._span(start, self._prev()))
        return lhs

    def unary(self) -> Formula:
        tok = self.peek()
        ctor = {
            "NOT": Not,
            "NEXT": Next,
            "FINALLY": Finally,
            "GLOBALLY": Globally,
        }.get(tok.kind)
        if ctor is not None:
            self.advance()
            operand = self.unary()
            return ctor(operand, self._span(tok, self._prev()))
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.advance()
            f = self.formula()
            self.expect("RPAREN", "')'")
            return f
        if tok.kind == "LBRACK":
            self.advance()
            target = self.expect("IDENT", "a cell or output name")
            self.expect("LARROW", "'<-'")
            value = self.term()
            end = self.expect("RBRACK", "']'")
            return Update(target.text, value, self._span(tok, end))
        if tok.kind == "IDENT":
            name = self.advance()
            args: list[FunctionTerm] = []
            while self.peek().kind in ("IDENT", "LPAREN"):
                args.append(self.term_arg())
            span = self._span(name, self._prev())
            term = PredicateTerm(name.text, tuple(args), span)
            return Pred(term, span)
        self.fail("a formula")
        raise AssertionError("unreachable")

    # -- terms ---------------------------------------------------------

    def term(self) -> FunctionTerm:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.term()
            self.expect("RPAREN", "')'")
            return inner
        if tok.kind != "IDENT":
            self.fail("a function term")
        name = self.advance()
        args: list[FunctionTerm] = []
        while self.peek().kind in ("IDENT", "LPAREN"):
            args.append(self.term_arg())
        if not args:
            return SignalRef(name.text, self._span(name, name))
        return Apply(name.text, tuple(args), self._span(name, self._prev()))

    def term_arg(self) -> FunctionTerm:
        tok = self.peek()
        if tok.kind == "IDENT":
            name = self.advance()
            return SignalRef(name.text, self._span(name, name))
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.term()
            self.expect("RPAREN", "')'")
            return inner
        self.fail("a term")
        raise AssertionError("unreachable")


def parse_spec(text: str) -> TslSpec:
    """Parse a whole specification.  Raises ParseError, never anything else."""
    parser = _Parser(tokenize(text))
    return parser.spec()


def parse_formula(text: str) -> Formula:
    """Parse a single formula (no trailing `;`)."""
    parser = _Parser(tokenize(text))
    f = parser.formula()
    if parser.peek().kind != "EOF":
        parser.fail("end of input")
    return f


def parse_term(text: str) -> FunctionTerm:
    """Parse a single function term, e.g. `moveLeft ball`."""
    parser = _Parser(tokenize(text))
    t = parser.term()
    if parser.peek().kind != "EOF":
        parser.fail("end of input")
    return t


def parse_predicate_term(text: str) -> PredicateTerm:
    """Parse a predicate atom such as `leftmost ball` or a bare name."""
    t = parse_term(text)
    if isinstance(t, SignalRef):
        return PredicateTerm(t.name, (), t.span)
    return PredicateTerm(t.function, t.args, t.span)
