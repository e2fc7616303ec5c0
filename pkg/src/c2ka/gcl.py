"""Guarded-command programs: parsing, rendering, and def/ref analysis.

The language is the small imperative fragment used for concrete behaviour
specifications: assignments, nondeterministic if-fi, receive, skip.  There
are no loops and programs are never executed; the only semantics extracted
here are the flow-insensitive sets of variables a program defines and
references.

Classification rules that matter for those sets:

* identifiers made of uppercase letters, digits and underscores are named
  constants, never variables;
* identifiers naming a known stimulus (in guard comparisons such as
  ``y >= crane1``) are stimulus literals, never variables;
* a ``receive`` binder is a message slot, not shared state: it shadows any
  same-named variable for the rest of the program and joins neither set;
* function calls are uninterpreted and their arguments are passed by value,
  so arguments are referenced, never defined;
* assigning ``null`` still defines the target.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

VarSet = frozenset  # frozenset[Variable]


@dataclass(frozen=True, order=True)
class Variable:
    base: str
    index: Optional[int] = None

    def __str__(self) -> str:
        return self.base if self.index is None else f"{self.base}[{self.index}]"


def parse_variable(text: str) -> Variable:
    """Inverse of ``str(Variable)``; accepts ``name`` or ``name[3]``."""
    m = re.fullmatch(r"([A-Za-z_]\w*)(?:\[(\d+)\])?", text.strip())
    if not m:
        raise ValueError(f"not a variable: {text!r}")
    return Variable(m.group(1), int(m.group(2)) if m.group(2) else None)


# --- AST ------------------------------------------------------------------


class Expression:
    __slots__ = ()


@dataclass(frozen=True)
class VarRef(Expression):
    var: Variable


@dataclass(frozen=True)
class ConstRef(Expression):
    name: str


@dataclass(frozen=True)
class NumLit(Expression):
    value: int


@dataclass(frozen=True)
class NullLit(Expression):
    pass


@dataclass(frozen=True)
class BoolLit(Expression):
    value: bool


@dataclass(frozen=True)
class StimulusLit(Expression):
    name: str


@dataclass(frozen=True)
class FnCall(Expression):
    name: str
    args: tuple[Expression, ...]


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    lhs: Expression
    rhs: Expression


class Statement:
    __slots__ = ()


@dataclass(frozen=True)
class Assign(Statement):
    target: Variable
    value: Expression


@dataclass(frozen=True)
class Receive(Statement):
    binder: str


@dataclass(frozen=True)
class IfFi(Statement):
    branches: tuple[tuple[Expression, tuple[Statement, ...]], ...]


@dataclass(frozen=True)
class Skip(Statement):
    pass


@dataclass(frozen=True)
class Program:
    body: tuple[Statement, ...] = field(default_factory=tuple)


_CONST_RE = re.compile(r"[A-Z][A-Z0-9_]*$")


def is_constant_name(name: str) -> bool:
    return bool(_CONST_RE.fullmatch(name))


# --- Errors ----------------------------------------------------------------


class GclSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownConstruct(GclSyntaxError):
    pass


# --- Lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<num>\d+)
    | (?P<ident>[A-Za-z_]\w*)
    | (?P<op>\[\]|:=|>=|->|[=+\-*/()\[\],;])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"if", "fi", "receive", "skip", "null", "true", "false"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "kw" | "eof"
    text: str
    line: int
    column: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise GclSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        kind = m.lastgroup or ""
        if kind != "ws":
            if kind == "ident" and lexeme in _KEYWORDS:
                kind = "kw"
            tokens.append(_Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- Parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token], known_stimuli: frozenset[str]):
        self.tokens = tokens
        self.i = 0
        self.stimuli = known_stimuli

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.cur
        self.i += 1
        return tok

    def _error(self, message: str) -> GclSyntaxError:
        return GclSyntaxError(message, self.cur.line, self.cur.column)

    def _eat(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.cur
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise self._error(f"expected {want!r}, found {tok.text!r}")
        return self._advance()

    def _at(self, kind: str, text: Optional[str] = None) -> bool:
        return self.cur.kind == kind and (text is None or self.cur.text == text)

    def parse_program(self, stop: tuple[str, ...] = ()) -> tuple[Statement, ...]:
        if self.cur.kind == "eof" or (self.cur.kind in ("op", "kw") and self.cur.text in stop):
            return ()
        stmts = [self.parse_statement()]
        while self._at("op", ";"):
            self._advance()
            stmts.append(self.parse_statement())
        return tuple(stmts)

    def parse_statement(self) -> Statement:
        tok = self.cur
        if tok.kind == "kw":
            if tok.text == "skip":
                self._advance()
                return Skip()
            if tok.text == "receive":
                self._advance()
                binder = self._eat("ident").text
                return Receive(binder)
            if tok.text == "if":
                return self.parse_iffi()
            raise UnknownConstruct(f"statement may not start with {tok.text!r}", tok.line, tok.column)
        if tok.kind == "ident":
            target = self.parse_lvalue()
            self._eat("op", ":=")
            value = self.parse_expression()
            return Assign(target, value)
        raise self._error(f"expected a statement, found {tok.text!r}")

    def parse_iffi(self) -> IfFi:
        self._eat("kw", "if")
        branches = [self.parse_guarded()]
        while self._at("op", "[]"):
            self._advance()
            branches.append(self.parse_guarded())
        self._eat("kw", "fi")
        return IfFi(tuple(branches))

    def parse_guarded(self) -> tuple[Expression, tuple[Statement, ...]]:
        self._eat("op", "(")
        guard = self.parse_expression()
        self._eat("op", ")")
        self._eat("op", "->")
        body = self.parse_program(stop=("[]", "fi"))
        return guard, body

    def parse_lvalue(self) -> Variable:
        name = self._eat("ident").text
        index = None
        if self._at("op", "["):
            self._advance()
            index = int(self._eat("num").text)
            self._eat("op", "]")
        return Variable(name, index)

    # expressions: comparison < additive < multiplicative < primary
    def parse_expression(self) -> Expression:
        lhs = self.parse_additive()
        if self._at("op", "=") or self._at("op", ">="):
            op = self._advance().text
            rhs = self.parse_additive()
            return BinOp(op, lhs, rhs)
        return lhs

    def parse_additive(self) -> Expression:
        expr = self.parse_multiplicative()
        while self._at("op", "+") or self._at("op", "-"):
            op = self._advance().text
            expr = BinOp(op, expr, self.parse_multiplicative())
        return expr

    def parse_multiplicative(self) -> Expression:
        expr = self.parse_primary()
        while self._at("op", "*") or self._at("op", "/"):
            op = self._advance().text
            expr = BinOp(op, expr, self.parse_primary())
        return expr

    def parse_primary(self) -> Expression:
        tok = self.cur
        if tok.kind == "num":
            self._advance()
            return NumLit(int(tok.text))
        if tok.kind == "kw" and tok.text == "null":
            self._advance()
            return NullLit()
        if tok.kind == "kw" and tok.text in ("true", "false"):
            self._advance()
            return BoolLit(tok.text == "true")
        if self._at("op", "("):
            self._advance()
            inner = self.parse_expression()
            self._eat("op", ")")
            return inner
        if tok.kind == "ident":
            self._advance()
            if self._at("op", "("):
                self._advance()
                args: list[Expression] = []
                if not self._at("op", ")"):
                    args.append(self.parse_expression())
                    while self._at("op", ","):
                        self._advance()
                        args.append(self.parse_expression())
                self._eat("op", ")")
                return FnCall(tok.text, tuple(args))
            if self._at("op", "["):
                self._advance()
                index = int(self._eat("num").text)
                self._eat("op", "]")
                return VarRef(Variable(tok.text, index))
            if is_constant_name(tok.text):
                return ConstRef(tok.text)
            if tok.text in self.stimuli:
                return StimulusLit(tok.text)
            return VarRef(Variable(tok.text))
        raise self._error(f"expected an expression, found {tok.text!r}")


def parse_program(text: str, known_stimuli: Iterable[str] = ()) -> Program:
    """Parse program text; stimulus names let guard literals be classified."""
    parser = _Parser(_lex(text), frozenset(known_stimuli))
    body = parser.parse_program()
    if parser.cur.kind != "eof":
        raise parser._error(f"unexpected {parser.cur.text!r} after program")
    return Program(body)


# --- Rendering -------------------------------------------------------------

_EXPR_PREC = {"=": 1, ">=": 1, "+": 2, "-": 2, "*": 3, "/": 3}


def _render_expr(expr: Expression, context: int = 0) -> str:
    if isinstance(expr, VarRef):
        return str(expr.var)
    if isinstance(expr, ConstRef):
        return expr.name
    if isinstance(expr, NumLit):
        return str(expr.value)
    if isinstance(expr, NullLit):
        return "null"
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, StimulusLit):
        return expr.name
    if isinstance(expr, FnCall):
        return f"{expr.name}({', '.join(_render_expr(a) for a in expr.args)})"
    if isinstance(expr, BinOp):
        prec = _EXPR_PREC[expr.op]
        # left-associative chains render unparenthesized on the left
        text = f"{_render_expr(expr.lhs, prec)} {expr.op} {_render_expr(expr.rhs, prec + 1)}"
        return f"({text})" if prec < context else text
    raise TypeError(f"not an expression: {expr!r}")


def _render_stmt(stmt: Statement) -> str:
    if isinstance(stmt, Assign):
        return f"{stmt.target} := {_render_expr(stmt.value)}"
    if isinstance(stmt, Receive):
        return f"receive {stmt.binder}"
    if isinstance(stmt, Skip):
        return "skip"
    if isinstance(stmt, IfFi):
        inner = " [] ".join(
            f"({_render_expr(guard)}) -> {_render_body(body)}" for guard, body in stmt.branches
        )
        return f"if {inner} fi"
    raise TypeError(f"not a statement: {stmt!r}")


def _render_body(body: tuple[Statement, ...]) -> str:
    return "; ".join(_render_stmt(s) for s in body)


def render_program(program: Program) -> str:
    return _render_body(program.body)


# --- def/ref ---------------------------------------------------------------


def _expr_vars(expr: Expression, bound: frozenset[str], out: set[Variable]) -> None:
    if isinstance(expr, VarRef):
        if expr.var.base not in bound:
            out.add(expr.var)
    elif isinstance(expr, FnCall):
        for arg in expr.args:
            _expr_vars(arg, bound, out)
    elif isinstance(expr, BinOp):
        _expr_vars(expr.lhs, bound, out)
        _expr_vars(expr.rhs, bound, out)
    # literals and constants contribute nothing


def _binders(body: tuple[Statement, ...], out: set[str]) -> None:
    for stmt in body:
        if isinstance(stmt, Receive):
            out.add(stmt.binder)
        elif isinstance(stmt, IfFi):
            for _, branch in stmt.branches:
                _binders(branch, out)


def _walk(
    body: tuple[Statement, ...],
    bound: frozenset[str],
    defs: set[Variable],
    refs: set[Variable],
) -> None:
    for stmt in body:
        if isinstance(stmt, Assign):
            if stmt.target.base not in bound and not is_constant_name(stmt.target.base):
                defs.add(stmt.target)
            _expr_vars(stmt.value, bound, refs)
        elif isinstance(stmt, IfFi):
            for guard, branch in stmt.branches:
                _expr_vars(guard, bound, refs)
                _walk(branch, bound, defs, refs)
        # Receive and Skip: nothing


def _def_ref(program: Program) -> tuple[VarSet, VarSet]:
    binders: set[str] = set()
    _binders(program.body, binders)
    defs: set[Variable] = set()
    refs: set[Variable] = set()
    _walk(program.body, frozenset(binders), defs, refs)
    return frozenset(defs), frozenset(refs)


def def_vars(program: Program) -> VarSet:
    """Variables the program defines (flow-insensitive union)."""
    return _def_ref(program)[0]


def ref_vars(program: Program) -> VarSet:
    """Variables the program references, in right-hand sides, arguments and guards."""
    return _def_ref(program)[1]
