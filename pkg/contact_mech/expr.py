"""
Scalar-field expressions read from run configurations.

Grammar (whitespace between tokens is ignored):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := number | name | func '(' expr ')' | '(' expr ')'

`^` binds tighter than unary minus (so -q^2 is -(q^2)) and is right
associative; the other binary operators are left associative. Names are either
declared coordinates or constants, and constants are replaced by their values
while parsing.

>>> e = parse('p^2/2 + q', ['q', 'p', 'z'])
>>> evaluate(e, {'q': 1.0, 'p': 2.0, 'z': 0.0})
3.0
"""

import math
import re
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .dual import FUNCTIONS, DomainError, Dual, power, pow_, real
from .numeric_diff import ScalarField


class ParseError(ValueError):
    """Malformed expression; carries the 1-based line and column of the problem."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f'line {line}, column {column}: {message}')


class UnknownIdentifierError(ParseError):
    """A name that is neither a declared coordinate, a constant nor a function."""

    def __init__(self, name: str, line: int, column: int):
        self.name = name
        super().__init__(f'unknown identifier {name!r}', line, column)


class UnboundVariableError(KeyError):
    """Evaluation reached a variable missing from the bindings."""


# AST nodes are immutable so parsed expressions can be shared freely.


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: 'Expr'


@dataclass(frozen=True)
class BinOp:
    op: str
    left: 'Expr'
    right: 'Expr'


@dataclass(frozen=True)
class Call:
    func: str
    arg: 'Expr'


Expr = Num | Var | Neg | BinOp | Call


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r'\s*(?:'
    r'(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<name>[A-Za-z_][A-Za-z0-9_]*)'
    r'|(?P<op>[-+*/^()])'
    r')'
)


def _line_col(source: str, pos: int) -> tuple[int, int]:
    line = source.count('\n', 0, pos) + 1
    column = pos - (source.rfind('\n', 0, pos) + 1) + 1
    return line, column


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(source) and source[pos].isspace():
            pos += 1
        if pos >= len(source):
            tokens.append(Token('end', '', pos))
            return tokens
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            raise ParseError(f'unexpected character {source[pos]!r}', *_line_col(source, pos))
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, source: str, coords: Sequence[str], constants: Mapping[str, float]):
        self.source = source
        self.coords = set(coords)
        self.constants = constants
        self.tokens = tokenize(source)
        self.i = 0

    def error(self, message: str, token: Token) -> ParseError:
        return ParseError(message, *_line_col(self.source, token.pos))

    @property
    def current(self) -> Token:
        return self.tokens[self.i]

    def accept(self, *ops: str) -> Token | None:
        tok = self.current
        if tok.kind == 'op' and tok.text in ops:
            self.i += 1
            return tok
        return None

    def expect(self, op: str) -> None:
        if self.accept(op) is None:
            tok = self.current
            found = 'end of input' if tok.kind == 'end' else repr(tok.text)
            raise self.error(f'expected {op!r}, found {found}', tok)

    def parse(self) -> Expr:
        tree = self.expr()
        if self.current.kind != 'end':
            raise self.error(f'unexpected {self.current.text!r}', self.current)
        return tree

    def expr(self) -> Expr:
        tree = self.term()
        while tok := self.accept('+', '-'):
            tree = BinOp(tok.text, tree, self.term())
        return tree

    def term(self) -> Expr:
        tree = self.unary()
        while tok := self.accept('*', '/'):
            tree = BinOp(tok.text, tree, self.unary())
        return tree

    def unary(self) -> Expr:
        if self.accept('-'):
            operand = self.unary()
            # fold literals so that printed negative numbers parse back unchanged
            if isinstance(operand, Num):
                return Num(-operand.value)
            return Neg(operand)
        if self.accept('+'):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept('^'):
            return BinOp('^', base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.current
        if tok.kind == 'num':
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == 'name':
            self.i += 1
            return self.name(tok)
        if self.accept('('):
            inner = self.expr()
            self.expect(')')
            return inner
        found = 'end of input' if tok.kind == 'end' else repr(tok.text)
        raise self.error(f'expected a number, name or "(", found {found}', tok)

    def name(self, tok: Token) -> Expr:
        name = tok.text
        if name in self.coords:
            return Var(name)
        if name in self.constants:
            return Num(float(self.constants[name]))
        if name in FUNCTIONS:
            if self.current.kind == 'op' and self.current.text == '(':
                self.i += 1
                arg = self.expr()
                self.expect(')')
                return Call(name, arg)
            raise self.error(f'function {name!r} must be applied to a parenthesized argument', tok)
        raise UnknownIdentifierError(name, *_line_col(self.source, tok.pos))


def parse(
    source: str, coords: Sequence[str], constants: Mapping[str, float] | None = None
) -> Expr:
    """
    Parses `source` into an expression over the coordinates `coords`.

    Names in `constants` are substituted by their values; coordinates shadow
    constants of the same name.

    Raises
    ------
    ParseError with line and column for syntax errors
    UnknownIdentifierError naming any undeclared identifier
    """
    constants = dict(constants or {})
    for name, value in constants.items():
        if not math.isfinite(float(value)):
            raise ValueError(f'constant {name!r} must be finite, got {value}')
    return _Parser(source, coords, constants).parse()


# Printing. Binding strength of each node kind, loosest first.
_PREC = {'+': 1, '-': 1, '*': 2, '/': 2, 'neg': 3, '^': 4, 'atom': 5}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC['neg']
    return _PREC['atom']


def _wrap(e: Expr, parens: bool) -> str:
    text = to_source(e)
    return f'({text})' if parens else text


def to_source(e: Expr) -> str:
    """Prints `e` with the fewest parentheses that reparse to the same tree."""
    if isinstance(e, Num):
        text = repr(e.value)
        return f'({text})' if e.value < 0 or text.startswith('-') else text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f'{e.func}({to_source(e.arg)})'
    if isinstance(e, Neg):
        return '-' + _wrap(e.operand, _prec(e.operand) < _PREC['neg'])
    if e.op == '^':
        left = _wrap(e.left, _prec(e.left) <= _PREC['^'])
        right = _wrap(e.right, _prec(e.right) < _PREC['neg'])
        return f'{left}^{right}'
    p = _PREC[e.op]
    left = _wrap(e.left, _prec(e.left) < p)
    right = _wrap(e.right, _prec(e.right) <= p)
    return f'{left} {e.op} {right}'


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return set()


def _divide(a: Any, b: Any) -> Any:
    if not isinstance(a, Dual) and not isinstance(b, Dual) and real(b) == 0.0:
        raise DomainError('division by zero', argument=0.0)
    return a / b


def evaluate(e: Expr, bindings: Mapping[str, Any]) -> Any:
    """
    Evaluates `e` with variables taken from `bindings`.

    Bindings may be floats or `Dual` numbers; with duals the result carries
    exact partial derivatives.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return bindings[e.name]
        except KeyError as err:
            raise UnboundVariableError(f'variable {e.name!r} is not bound') from err
    if isinstance(e, Neg):
        return -evaluate(e.operand, bindings)
    if isinstance(e, Call):
        arg = evaluate(e.arg, bindings)
        try:
            return FUNCTIONS[e.func](arg)
        except DomainError as err:
            coordinate = e.arg.name if isinstance(e.arg, Var) else to_source(e.arg)
            raise DomainError(
                f'{e.func} undefined at {real(arg):.6g}', argument=err.argument, coordinate=coordinate
            ) from err
    left = evaluate(e.left, bindings)
    if e.op == '^':
        try:
            if isinstance(e.right, Num):
                return power(left, e.right.value)
            return pow_(left, evaluate(e.right, bindings))
        except DomainError as err:
            coordinate = e.left.name if isinstance(e.left, Var) else to_source(e.left)
            raise DomainError(str(err), argument=err.argument, coordinate=coordinate) from err
    right = evaluate(e.right, bindings)
    if e.op == '+':
        return left + right
    if e.op == '-':
        return left - right
    if e.op == '*':
        return left * right
    return _divide(left, right)


def field_from_expression(
    source: str,
    coords: Sequence[str],
    constants: Mapping[str, float] | None = None,
    label: str = 'f',
) -> ScalarField:
    """Parses `source` and wraps it as a `ScalarField` over `coords`."""
    tree = parse(source, coords, constants)
    names = tuple(coords)

    def fn(*args):
        return evaluate(tree, dict(zip(names, args)))

    return ScalarField(names, fn, label, source=to_source(tree))
