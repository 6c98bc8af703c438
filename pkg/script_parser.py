#!/usr/bin/env python3
"""
Script Parser Module for the Graded Calculus Tool
This module turns the text of a calculation script into tokens and then into
an abstract syntax tree of declarations and commands with source positions.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from calc_errors import ScriptSyntaxError

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('script_parser')

TOKEN_PATTERN = re.compile(r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<op>[-+*/^(){}\[\],;:=|])
""", re.VERBOSE)

DECLARATION_KEYWORDS = ('domain', 'fn', 'morphism', 'field', 'form', 'atlas', 'bundle', 'global')


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int
    spaced: bool = True


def tokenize(text: str) -> List[Token]:
    """
    Split script text into tokens, dropping blanks and '#' comments.

    Raises:
        ScriptSyntaxError: an unexpected character was found
    """
    tokens = []
    line, line_start, pos = 1, 0, 0
    spaced = True
    while pos < len(text):
        match = TOKEN_PATTERN.match(text, pos)
        if not match:
            raise ScriptSyntaxError(f"Unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == 'newline':
            line += 1
            line_start = match.end()
            spaced = True
        elif kind in ('space', 'comment'):
            spaced = True
        else:
            if kind == 'op' or kind == 'arrow':
                kind = match.group()
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1, pos, spaced))
            spaced = False
        pos = match.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1, pos, True))
    return tokens


# Expression nodes

@dataclass
class Num:
    value: int
    line: int = 0
    column: int = 0


@dataclass
class Name:
    ident: str
    line: int = 0
    column: int = 0


@dataclass
class BinOp:
    op: str
    left: 'Expr'
    right: 'Expr'
    line: int = 0
    column: int = 0


@dataclass
class Neg:
    operand: 'Expr'
    line: int = 0
    column: int = 0


@dataclass
class Pow:
    base: 'Expr'
    exponent: int
    line: int = 0
    column: int = 0


Expr = Union[Num, Name, BinOp, Neg, Pow]


# Statement nodes

@dataclass
class DomainDecl:
    name: str
    evens: List[str]
    coords: List[Tuple[str, int]]
    trunc: Optional[int] = None
    shift: Optional[int] = None
    line: int = 0
    column: int = 0


@dataclass
class FnDecl:
    name: str
    degree: Optional[int]
    domain: Optional[str]
    expr: Expr
    line: int = 0
    column: int = 0


@dataclass
class MorphismDecl:
    name: str
    source: str
    target: str
    assignments: List[Tuple[str, Expr]]
    line: int = 0
    column: int = 0


@dataclass
class FieldDecl:
    name: str
    degree: Optional[int]
    domain: str
    components: List[Tuple[str, Expr]]
    euler: bool = False
    line: int = 0
    column: int = 0


@dataclass
class FormDecl:
    name: str
    domain: str
    shift: Optional[int]
    expr: Expr
    line: int = 0
    column: int = 0


@dataclass
class AtlasDecl:
    name: str
    charts: List[Tuple[str, str]]
    transitions: List[Tuple[str, str, str]]
    line: int = 0
    column: int = 0


@dataclass
class BundleDecl:
    name: str
    base: str
    charts: List[str]
    fiber: List[int]
    transitions: List[Tuple[str, str, List[List[Expr]]]]
    line: int = 0
    column: int = 0


@dataclass
class GlobalDecl:
    name: str
    atlas: str
    degree: int
    representatives: List[Tuple[str, Expr]]
    line: int = 0
    column: int = 0


@dataclass
class PointArg:
    values: List[Fraction]


@dataclass
class ListArg:
    items: List[Expr]


@dataclass
class Command:
    name: str
    args: List[Union[str, Fraction, PointArg, ListArg]]
    text: str
    line: int = 0
    column: int = 0
    arg_positions: List[Tuple[int, int]] = field(default_factory=list)


Statement = Union[DomainDecl, FnDecl, MorphismDecl, FieldDecl, FormDecl, AtlasDecl, BundleDecl,
                  GlobalDecl, Command]


@dataclass
class Script:
    statements: List[Statement]
    source: str = ''

    @property
    def declarations(self) -> List[Statement]:
        return [s for s in self.statements if not isinstance(s, Command)]

    @property
    def commands(self) -> List[Command]:
        return [s for s in self.statements if isinstance(s, Command)]


class ScriptParser:
    """Recursive-descent parser over the token list of one script"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != 'eof':
            self.pos += 1
        return token

    def error(self, message: str, expected: List[str]) -> ScriptSyntaxError:
        token = self.current
        found = token.text or 'end of input'
        return ScriptSyntaxError(f"{message}, found {found!r}", token.line, token.column, expected)

    def check(self, kind: str, text: Optional[str] = None) -> bool:
        token = self.current
        return token.kind == kind and (text is None or token.text == text)

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        if self.check(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text: Optional[str] = None, what: str = '') -> Token:
        token = self.accept(kind, text)
        if token is None:
            if text:
                label = repr(text)
            elif what or kind in ('ident', 'int', 'eof'):
                label = what or kind
            else:
                label = repr(kind)
            raise self.error("Unexpected token", [label])
        return token

    def keyword(self, word: str) -> Token:
        return self.expect('ident', word)

    def ident(self, what: str = 'identifier') -> str:
        return self.expect('ident', what=what).text

    def label(self) -> str:
        token = self.current
        if token.kind in ('ident', 'int'):
            return self.advance().text
        raise self.error("Unexpected token", ['chart label'])

    def integer(self) -> int:
        negative = self.accept('-') is not None
        value = int(self.expect('int', what='integer').text)
        return -value if negative else value

    def rational(self) -> Fraction:
        negative = self.accept('-') is not None
        value = Fraction(int(self.expect('int', what='number').text))
        if self.accept('/'):
            value /= int(self.expect('int', what='denominator').text)
        return -value if negative else value

    # script

    def parse(self) -> Script:
        statements = []
        while not self.check('eof'):
            statements.append(self.statement())
        logger.debug(f"Parsed {len(statements)} statements")
        return Script(statements, self.text)

    def statement(self) -> Statement:
        token = self.current
        if token.kind != 'ident':
            raise self.error("Unexpected token", ['declaration', 'command'])
        hyphenated = self.peek().kind == '-' and not self.peek().spaced
        if token.text in DECLARATION_KEYWORDS and not hyphenated:
            return getattr(self, f"_{token.text}_decl")()
        return self.command()

    def _domain_decl(self) -> DomainDecl:
        start = self.keyword('domain')
        decl = DomainDecl(self.ident('domain name'), [], [], line=start.line, column=start.column)
        self.expect('{')
        while not self.accept('}'):
            if self.accept('ident', 'even'):
                decl.evens.append(self.ident('coordinate name'))
                while self.accept(','):
                    decl.evens.append(self.ident('coordinate name'))
            elif self.accept('ident', 'coord'):
                names = [self.ident('coordinate name')]
                while self.accept(','):
                    names.append(self.ident('coordinate name'))
                self.expect(':')
                degree = self.integer()
                decl.coords.extend((n, degree) for n in names)
            elif self.accept('ident', 'trunc'):
                decl.trunc = self.integer()
            elif self.accept('ident', 'shift'):
                decl.shift = self.integer()
            else:
                raise self.error("Unexpected token in domain", ["'even'", "'coord'", "'trunc'", "'shift'", "'}'"])
            self.expect(';')
        self.accept(';')
        return decl

    def _fn_decl(self) -> FnDecl:
        start = self.keyword('fn')
        name = self.ident('function name')
        degree = self.integer() if self.accept(':') else None
        domain = self.ident('domain name') if self.accept('ident', 'in') else None
        self.expect('=')
        expr = self.expr()
        self.expect(';')
        return FnDecl(name, degree, domain, expr, start.line, start.column)

    def _morphism_decl(self) -> MorphismDecl:
        start = self.keyword('morphism')
        name = self.ident('morphism name')
        self.expect(':')
        source = self.ident('source domain')
        self.expect('->')
        target = self.ident('target domain')
        self.expect('{')
        assignments = []
        while not self.accept('}'):
            coordinate = self.ident('target coordinate')
            self.expect('=')
            assignments.append((coordinate, self.expr()))
            self.expect(';')
        self.accept(';')
        return MorphismDecl(name, source, target, assignments, start.line, start.column)

    def _field_decl(self) -> FieldDecl:
        start = self.keyword('field')
        name = self.ident('field name')
        degree = self.integer() if self.accept(':') else None
        self.keyword('in')
        domain = self.ident('domain name')
        if self.accept('='):
            self.keyword('euler')
            self.expect(';')
            return FieldDecl(name, degree, domain, [], True, start.line, start.column)
        self.expect('{')
        components = []
        while not self.accept('}'):
            coordinate = self.ident('coordinate name')
            self.expect(':')
            components.append((coordinate, self.expr()))
            self.expect(';')
        self.accept(';')
        return FieldDecl(name, degree, domain, components, False, start.line, start.column)

    def _form_decl(self) -> FormDecl:
        start = self.keyword('form')
        name = self.ident('form name')
        self.keyword('in')
        domain = self.ident('domain name')
        shift = self.integer() if self.accept('ident', 'shift') else None
        self.expect('=')
        expr = self.expr()
        self.expect(';')
        return FormDecl(name, domain, shift, expr, start.line, start.column)

    def _atlas_decl(self) -> AtlasDecl:
        start = self.keyword('atlas')
        decl = AtlasDecl(self.ident('atlas name'), [], [], start.line, start.column)
        self.expect('{')
        while not self.accept('}'):
            if self.accept('ident', 'chart'):
                label = self.label()
                self.expect('=')
                decl.charts.append((label, self.ident('domain name')))
            elif self.accept('ident', 'transition'):
                first, second = self.label(), self.label()
                self.expect('=')
                decl.transitions.append((first, second, self.ident('morphism name')))
            else:
                raise self.error("Unexpected token in atlas", ["'chart'", "'transition'", "'}'"])
            self.expect(';')
        self.accept(';')
        return decl

    def _bundle_decl(self) -> BundleDecl:
        start = self.keyword('bundle')
        name = self.ident('bundle name')
        self.keyword('over')
        decl = BundleDecl(name, self.ident('atlas or domain name'), [], [], [], start.line, start.column)
        self.expect('{')
        while not self.accept('}'):
            if self.accept('ident', 'charts'):
                decl.charts.append(self.label())
                while self.accept(','):
                    decl.charts.append(self.label())
            elif self.accept('ident', 'fiber'):
                decl.fiber.append(self.integer())
                while self.accept(','):
                    decl.fiber.append(self.integer())
            elif self.accept('ident', 'transition'):
                first, second = self.label(), self.label()
                self.expect('=')
                decl.transitions.append((first, second, self.matrix()))
            else:
                raise self.error("Unexpected token in bundle", ["'charts'", "'fiber'", "'transition'", "'}'"])
            self.expect(';')
        self.accept(';')
        return decl

    def _global_decl(self) -> GlobalDecl:
        start = self.keyword('global')
        name = self.ident('function name')
        self.keyword('in')
        atlas = self.ident('atlas name')
        self.expect(':')
        degree = self.integer()
        self.expect('{')
        representatives = []
        while not self.accept('}'):
            label = self.label()
            self.expect(':')
            representatives.append((label, self.expr()))
            self.expect(';')
        self.accept(';')
        return GlobalDecl(name, atlas, degree, representatives, start.line, start.column)

    def matrix(self) -> List[List[Expr]]:
        self.expect('[')
        rows = [self.row()]
        while self.accept(','):
            rows.append(self.row())
        self.expect(']')
        return rows

    def row(self) -> List[Expr]:
        self.expect('[')
        entries = [self.expr()]
        while self.accept(','):
            entries.append(self.expr())
        self.expect(']')
        return entries

    def command(self) -> Command:
        start = self.advance()
        name = start.text
        # hyphenated command names such as invert-morphism are written without blanks
        while self.check('-') and not self.current.spaced and self.peek().kind == 'ident' and not self.peek().spaced:
            self.advance()
            name += '-' + self.advance().text
        command = Command(name, [], '', start.line, start.column)
        while not self.check(';'):
            token = self.current
            command.arg_positions.append((token.line, token.column))
            command.args.append(self.argument())
        end = self.expect(';')
        command.text = self.text[start.offset:end.offset].strip()
        return command

    def argument(self):
        token = self.current
        if token.kind == 'ident':
            return self.advance().text
        if token.kind in ('int', '-'):
            return self.rational()
        if self.accept('('):
            values = []
            if not self.check(')'):
                values.append(self.rational())
                while self.accept(','):
                    values.append(self.rational())
            self.expect(')')
            return PointArg(values)
        if self.accept('['):
            items = []
            if not self.check(']'):
                items.append(self.expr())
                while self.accept(','):
                    items.append(self.expr())
            self.expect(']')
            return ListArg(items)
        raise self.error("Unexpected command argument", ['name', 'number', 'point', 'list', "';'"])

    # expressions

    def expr(self) -> Expr:
        node = self.term()
        while self.check('+') or self.check('-'):
            op = self.advance()
            node = BinOp(op.text, node, self.term(), op.line, op.column)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.check('*') or self.check('/'):
            op = self.advance()
            node = BinOp(op.text, node, self.unary(), op.line, op.column)
        return node

    def unary(self) -> Expr:
        token = self.accept('-')
        if token:
            return Neg(self.unary(), token.line, token.column)
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        token = self.accept('^')
        if token:
            node = Pow(node, self.integer(), token.line, token.column)
        return node

    def atom(self) -> Expr:
        token = self.current
        if token.kind == 'int':
            self.advance()
            return Num(int(token.text), token.line, token.column)
        if token.kind == 'ident':
            self.advance()
            return Name(token.text, token.line, token.column)
        if self.accept('('):
            node = self.expr()
            self.expect(')')
            return node
        raise self.error("Unexpected token in expression", ['number', 'name', "'('"])


def parse_script(text: str) -> Script:
    """Parse a whole script"""
    return ScriptParser(text).parse()


def parse_expression(text: str) -> Expr:
    """Parse a single expression, as produced by the canonical renderer"""
    parser = ScriptParser(text)
    node = parser.expr()
    if not parser.check('eof'):
        raise parser.error("Trailing input after expression", ['end of input'])
    return node
