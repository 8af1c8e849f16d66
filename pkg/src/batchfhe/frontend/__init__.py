"""Source language: lexer, parser, type checker, lowering to IR."""

from __future__ import annotations

from typing import Optional

from ..ir.core import IrFunction
from .lexer import Token, TokenKind, tokenize
from .lower import lower_function, lower_to_ir
from .parser import parse, parse_expr, parse_source
from .printer import print_expr, print_program
from .typecheck import DslType, TypedProgram, check_types


def compile_source(source: str, defines: Optional[dict[str, int]] = None,
                   modulus: int = 65537, name: Optional[str] = None) -> tuple[TypedProgram, IrFunction]:
    """Front end in one call: source text to (checked program, lowered entry function)."""
    prog = check_types(parse(tokenize(source)), defines, modulus)
    return prog, lower_function(prog, name)


__all__ = [
    "DslType", "Token", "TokenKind", "TypedProgram", "check_types", "compile_source", "lower_function",
    "lower_to_ir", "parse", "parse_expr", "parse_source", "print_expr", "print_program", "tokenize",
]
