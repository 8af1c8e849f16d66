"""Recursive-descent parser.

Grammar (``{}`` repetition, ``[]`` optional)::

    program  := { const | function }            (at least one function)
    const    := "const" IDENT "=" expr ";"
    function := type IDENT "(" [param {"," param}] ")" "{" {stmt} "}"
    type     := ["secret"] "int" ["[" expr "]"]
    stmt     := type IDENT ["=" (expr | "{" expr {"," expr} "}")] ";"
              | IDENT ("=" | "+=" | "-=" | "*=") expr ";"
              | index ("=" | "+=" | "-=" | "*=") expr ";"
              | "for" IDENT "in" expr ".." expr ":" block
              | "return" expr ";"
    block    := "{" {stmt} "}" | stmt
    expr     := sum {"<<" sum}
    sum      := term {("+" | "-") term}
    term     := unary {"*" unary}
    unary    := "-" unary | primary
    primary  := INT | IDENT | index | "(" expr ")" | IDENT "(" expr ")"
    index    := IDENT "[" expr ["%" primary] "]"
"""

from __future__ import annotations

from ..errors import ParseError
from . import ast
from .lexer import Token, TokenKind, tokenize

_ASSIGN_OPS = ("=", "+=", "-=", "*=")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in (TokenKind.PUNCT, TokenKind.OP, TokenKind.KEYWORD) and t.text == text

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind is not TokenKind.EOF:
            self.pos += 1
        return t

    def error(self, expected: set[str] | frozenset[str]) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind is TokenKind.EOF else repr(t.text)
        return ParseError(f"unexpected {found}", t.span.line, t.span.column, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error({repr(text)})
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind is not TokenKind.IDENT:
            raise self.error({"identifier"})
        return self.advance()

    # top level

    def program(self) -> ast.Program:
        start = self.tok.span
        consts, functions = [], []
        while self.tok.kind is not TokenKind.EOF:
            if self.at("const"):
                consts.append(self.const_def())
            elif self.at("secret") or self.at("int"):
                functions.append(self.function())
            else:
                raise self.error({"'const'", "'secret'", "'int'"})
        if not functions:
            raise ParseError("a program needs at least one function", start.line, start.column)
        return ast.Program(consts, functions, start)

    def const_def(self) -> ast.ConstDef:
        kw = self.expect("const")
        name = self.expect_ident().text
        self.expect("=")
        value = self.expr()
        self.expect(";")
        return ast.ConstDef(name, value, kw.span)

    def type_spec(self) -> ast.TypeSpec:
        start = self.tok.span
        secret = False
        if self.at("secret"):
            self.advance()
            secret = True
        self.expect("int")
        length = None
        if self.at("["):
            self.advance()
            length = self.expr()
            self.expect("]")
        return ast.TypeSpec(secret, length, start)

    def function(self) -> ast.Function:
        ret = self.type_spec()
        name = self.expect_ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ptype = self.type_spec()
                pname = self.expect_ident()
                params.append(ast.Param(ptype, pname.text, ptype.span))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        if not self.at("{"):
            raise self.error({"'{'"})
        body = self.block()
        return ast.Function(ret, name.text, params, body, ret.span)

    # statements

    def block(self) -> list:
        if self.at("{"):
            self.advance()
            stmts = []
            while not self.at("}"):
                if self.tok.kind is TokenKind.EOF:
                    raise self.error({"'}'"})
                stmts.append(self.stmt())
            self.advance()
            return stmts
        return [self.stmt()]

    def stmt(self):
        t = self.tok
        if self.at("secret") or self.at("int"):
            return self.decl()
        if self.at("for"):
            return self.for_stmt()
        if self.at("return"):
            self.advance()
            value = self.expr()
            self.expect(";")
            return ast.Return(value, t.span)
        if t.kind is TokenKind.IDENT:
            if self.toks[self.pos + 1].text == "[" and self.toks[self.pos + 1].kind is TokenKind.PUNCT:
                target = self.index_expr()
                op = self.assign_op()
                value = self.expr()
                self.expect(";")
                return ast.IndexAssign(target, op, value, t.span)
            self.advance()
            op = self.assign_op()
            value = self.expr()
            self.expect(";")
            return ast.Assign(t.text, op, value, t.span)
        raise self.error({"'secret'", "'int'", "'for'", "'return'", "identifier"})

    def assign_op(self) -> str:
        if self.tok.kind is TokenKind.OP and self.tok.text in _ASSIGN_OPS:
            return self.advance().text
        raise self.error({repr(o) for o in _ASSIGN_OPS})

    def decl(self) -> ast.Decl:
        ty = self.type_spec()
        name = self.expect_ident()
        init = None
        if self.at("="):
            self.advance()
            if self.at("{"):
                start = self.advance().span
                items = [self.expr()]
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
                self.expect("}")
                init = ast.ArrayLit(items, start)
            else:
                init = self.expr()
        self.expect(";")
        return ast.Decl(ty, name.text, init, ty.span)

    def for_stmt(self) -> ast.For:
        kw = self.expect("for")
        var = self.expect_ident().text
        self.expect("in")
        lo = self.expr()
        self.expect("..")
        hi = self.expr()
        self.expect(":")
        if self.tok.kind is TokenKind.EOF or self.at("}"):
            raise self.error({"loop body"})
        body = self.block()
        return ast.For(var, lo, hi, body, kw.span)

    # expressions

    def expr(self):
        lhs = self.sum()
        while self.at("<<"):
            op = self.advance()
            lhs = ast.Binary("<<", lhs, self.sum(), op.span)
        return lhs

    def sum(self):
        lhs = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance()
            lhs = ast.Binary(op.text, lhs, self.term(), op.span)
        return lhs

    def term(self):
        lhs = self.unary()
        while self.at("*"):
            op = self.advance()
            lhs = ast.Binary("*", lhs, self.unary(), op.span)
        return lhs

    def unary(self):
        if self.at("-"):
            op = self.advance()
            return ast.Neg(self.unary(), op.span)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind is TokenKind.INT:
            self.advance()
            return ast.Literal(int(t.text), t.span)
        if t.kind is TokenKind.IDENT:
            nxt = self.toks[self.pos + 1]
            if nxt.kind is TokenKind.PUNCT and nxt.text == "[":
                return self.index_expr()
            if nxt.kind is TokenKind.PUNCT and nxt.text == "(":
                self.advance()
                self.advance()
                arg = self.expr()
                self.expect(")")
                return ast.Call(t.text, [arg], t.span)
            self.advance()
            return ast.Var(t.text, t.span)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise self.error({"integer", "identifier", "'('", "'-'"})

    def index_expr(self) -> ast.Index:
        name = self.expect_ident()
        self.expect("[")
        idx = self.expr()
        modulus = None
        if self.at("%"):
            self.advance()
            modulus = self.primary()
        self.expect("]")
        return ast.Index(name.text, idx, modulus, name.span)


def parse(tokens: list[Token]) -> ast.Program:
    """Parse a token stream produced by :func:`tokenize`."""
    return _Parser(tokens).program()


def parse_source(source: str) -> ast.Program:
    return parse(tokenize(source))


def parse_expr(source: str):
    """Parse a single expression (used by tests and the REPL helpers)."""
    p = _Parser(tokenize(source))
    e = p.expr()
    if p.tok.kind is not TokenKind.EOF:
        raise p.error({"end of input"})
    return e
