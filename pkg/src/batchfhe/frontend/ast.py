"""Syntax tree for the source language.

Spans are excluded from equality so that a printed-and-reparsed tree
compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .lexer import Span

_NOSPAN = Span(0, 0, 0, 0)


def _span() -> Span:
    return field(default=_NOSPAN, compare=False, repr=False)


# expressions

@dataclass
class Literal:
    value: int
    span: Span = _span()


@dataclass
class Var:
    name: str
    span: Span = _span()


@dataclass
class Neg:
    operand: "Expr"
    span: Span = _span()


@dataclass
class Binary:
    op: str  # '+', '-', '*', '<<'
    lhs: "Expr"
    rhs: "Expr"
    span: Span = _span()


@dataclass
class Index:
    name: str
    index: "Expr"
    modulus: Optional["Expr"] = None
    span: Span = _span()


@dataclass
class Call:
    """Compile-time builtin call; only ``isqrt`` inside ``const`` definitions."""

    name: str
    args: list["Expr"]
    span: Span = _span()


@dataclass
class ArrayLit:
    items: list["Expr"]
    span: Span = _span()


Expr = Union[Literal, Var, Neg, Binary, Index, Call]


# declarations and statements

@dataclass
class TypeSpec:
    secret: bool
    length: Optional["Expr"] = None  # None for scalars
    span: Span = _span()


@dataclass
class Decl:
    type: TypeSpec
    name: str
    init: Optional[Union["Expr", ArrayLit]] = None
    span: Span = _span()


@dataclass
class Assign:
    name: str
    op: str  # '=', '+=', '-=', '*='
    value: "Expr"
    span: Span = _span()


@dataclass
class IndexAssign:
    target: Index
    op: str
    value: "Expr"
    span: Span = _span()


@dataclass
class For:
    var: str
    lo: "Expr"
    hi: "Expr"
    body: list["Stmt"]
    span: Span = _span()


@dataclass
class Return:
    value: "Expr"
    span: Span = _span()


Stmt = Union[Decl, Assign, IndexAssign, For, Return]


@dataclass
class Param:
    type: TypeSpec
    name: str
    span: Span = _span()


@dataclass
class Function:
    ret_type: TypeSpec
    name: str
    params: list[Param]
    body: list[Stmt]
    span: Span = _span()


@dataclass
class ConstDef:
    name: str
    value: "Expr"
    span: Span = _span()


@dataclass
class Program:
    consts: list[ConstDef]
    functions: list[Function]
    span: Span = _span()
