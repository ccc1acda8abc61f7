"""
Tokenizer and recursive-descent parser for diagram expressions

Grammar::

    expr   := term { ";" term }              stacked top to bottom
    term   := factor { "*" factor }          placed left to right
    factor := "id(" INT ")" | "cup" | "cap" | "proj"
            | "op(" LABEL [ "," FLAVOR ] ")" | "ket(" LABEL ")" | "bra(" LABEL ")"
            | NUMBER | "(" expr ")"
    FLAVOR := "dag" | "T" | "conj"

Numbers may be complex, written ``a+bi``, ``a-bi`` or ``bi``. A ``#`` starts a
comment that runs to the end of the line.
"""

import cmath
import logging
import re
from dataclasses import dataclass
from typing import Iterator, List

from ..errors import ParseError, UnknownFlavorError
from .nodes import (
    FLAVOR_NAMES,
    Bra,
    Cap,
    Compose,
    Cup,
    DiagramExpr,
    Id,
    Ket,
    Op,
    Proj,
    Scalar,
    Tensor,
)

logger = logging.getLogger(__name__)

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(_REAL)

TOKEN_SPEC = [
    ("NUMBER", rf"-?{_REAL}(?:[+-](?:{_REAL})?i|i)?"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z0-9_]+)?"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("SEMI", r";"),
    ("STAR", r"\*"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+|#[^\n]*"),
    ("MISMATCH", r"."),
]
TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in TOKEN_SPEC))

KEYWORDS = {"id", "cup", "cap", "proj", "op", "ket", "bra"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> Iterator[Token]:
    """Yield tokens with 1-based line and column, ending with an EOF token"""
    line, line_start = 1, 0
    for match in TOKEN_RE.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line, line_start = line + 1, match.end()
            continue
        if kind == "SKIP":
            continue
        if kind == "MISMATCH":
            raise ParseError(f"Unexpected character {match.group()!r}", line, column)
        yield Token(kind, match.group(), line, column)
    yield Token("EOF", "", line, len(text) - line_start + 1)


def parse_number(text: str) -> complex:
    """Value of a NUMBER token: a real, a real plus or minus an imaginary part, or an imaginary"""
    if not text.endswith("i"):
        return complex(float(text), 0.0)
    body = text[:-1]
    head = _REAL_RE.match(body, 1 if body.startswith("-") else 0)
    real_end = head.end()
    if real_end == len(body):
        return complex(0.0, float(body))
    real = float(body[:real_end])
    imag_text = body[real_end:]
    imag = float(imag_text + "1") if imag_text in ("+", "-") else float(imag_text)
    return complex(real, imag)


class Parser:
    """
    Parses one expression

    Args:
        text: Source text
    """

    def __init__(self, text: str):
        self.tokens: List[Token] = list(tokenize(text))
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.current
        if token.kind != "EOF":
            self.index += 1
        return token

    def _expect(self, kind: str, what: str) -> Token:
        token = self.current
        if token.kind != kind:
            found = "end of input" if token.kind == "EOF" else repr(token.text)
            raise ParseError(f"Expected {what}, found {found}", token.line, token.column)
        return self._advance()

    def parse(self) -> DiagramExpr:
        node = self.expr()
        if self.current.kind != "EOF":
            token = self.current
            raise ParseError(f"Unexpected {token.text!r} after a complete expression", token.line, token.column)
        return node

    def expr(self) -> DiagramExpr:
        node = self.term()
        while self.current.kind == "SEMI":
            token = self._advance()
            node = Compose(node, self.term(), line=token.line, column=token.column)
        return node

    def term(self) -> DiagramExpr:
        node = self.factor()
        while self.current.kind == "STAR":
            token = self._advance()
            node = Tensor(node, self.factor(), line=token.line, column=token.column)
        return node

    def factor(self) -> DiagramExpr:
        token = self.current
        position = {"line": token.line, "column": token.column}
        if token.kind == "NUMBER":
            self._advance()
            value = parse_number(token.text)
            if not cmath.isfinite(value):
                raise ParseError(f"Number {token.text!r} is not finite", token.line, token.column)
            return Scalar(value, **position)
        if token.kind == "LPAREN":
            self._advance()
            node = self.expr()
            self._expect("RPAREN", "')'")
            return node
        if token.kind != "IDENT" or token.text not in KEYWORDS:
            found = "end of input" if token.kind == "EOF" else repr(token.text)
            raise ParseError(f"Expected a diagram, found {found}", token.line, token.column)

        self._advance()
        keyword = token.text
        if keyword == "cup":
            return Cup(**position)
        if keyword == "cap":
            return Cap(**position)
        if keyword == "proj":
            return Proj(**position)

        self._expect("LPAREN", f"'(' after {keyword}")
        if keyword == "id":
            size = self._expect("NUMBER", "a wire count")
            if not size.text.isdigit():
                raise ParseError(f"Wire count must be a non-negative integer, got {size.text!r}",
                                 size.line, size.column)
            self._expect("RPAREN", "')'")
            return Id(int(size.text), **position)

        label = self._label()
        if keyword == "op":
            flavor = None
            if self.current.kind == "COMMA":
                self._advance()
                flavor_token = self._expect("IDENT", "a flavor")
                if flavor_token.text not in FLAVOR_NAMES:
                    raise UnknownFlavorError(
                        f"Unknown flavor {flavor_token.text!r}; expected one of {', '.join(FLAVOR_NAMES)}",
                        flavor_token.line, flavor_token.column,
                    )
                flavor = flavor_token.text
            self._expect("RPAREN", "')'")
            return Op(label, flavor, **position)
        self._expect("RPAREN", "')'")
        return Ket(label, **position) if keyword == "ket" else Bra(label, **position)

    def _label(self) -> str:
        token = self.current
        if token.kind == "IDENT" or (token.kind == "NUMBER" and token.text.isdigit()):
            self._advance()
            return token.text
        found = "end of input" if token.kind == "EOF" else repr(token.text)
        raise ParseError(f"Expected a label, found {found}", token.line, token.column)


def parse(text: str) -> DiagramExpr:
    """
    Parse a diagram expression

    Raises:
        ParseError: syntax error, with line and column
        UnknownFlavorError: op(...) with a flavor other than dag, T or conj
    """
    node = Parser(text).parse()
    logger.debug(f"Parsed {type(node).__name__} from {len(text)} characters")
    return node
