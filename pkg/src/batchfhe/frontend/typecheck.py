"""Static checking: declarations, secrecy, shapes.

Loop bounds and indices are *not* required to be constant here; whether
they fold to integers is only known while unrolling, so that check lives in
:mod:`.lower` and reports an :class:`UnrollError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..errors import TypeCheckError
from . import ast

MAX_SLOTS = 1 << 16
DEFAULT_MODULUS = 65537


@dataclass(frozen=True)
class DslType:
    secret: bool
    length: Optional[int] = None  # None for scalars

    @property
    def is_vector(self) -> bool:
        return self.length is not None

    def __str__(self) -> str:
        s = "secret int" if self.secret else "int"
        return s if self.length is None else f"{s}[{self.length}]"


PLAIN = DslType(False)
SECRET = DslType(True)


@dataclass
class TypedFunction:
    node: ast.Function
    param_types: list[DslType]
    return_type: DslType
    slots: int  # shared length of every secret vector (1 if none)
    expr_types: dict[int, DslType] = field(default_factory=dict)
    decl_types: dict[int, DslType] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.node.name

    def type_of(self, node) -> DslType:
        return self.expr_types[id(node)]


@dataclass
class TypedProgram:
    ast: ast.Program
    consts: dict[str, int]
    functions: list[TypedFunction]
    modulus: int = DEFAULT_MODULUS

    def function(self, name: Optional[str] = None) -> TypedFunction:
        """The named function, or the entry point (``main`` if present, else the last one)."""
        if name is None:
            for f in self.functions:
                if f.name == "main":
                    return f
            return self.functions[-1]
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(f"no function named {name!r}")


def _err(msg: str, node) -> TypeCheckError:
    sp = getattr(node, "span", None)
    return TypeCheckError(msg, sp.line if sp else 0, sp.column if sp else 0)


def eval_const_expr(e, consts: dict[str, int]) -> int:
    """Evaluate an expression built only from literals and ``const`` names."""
    if isinstance(e, ast.Literal):
        return e.value
    if isinstance(e, ast.Var):
        if e.name not in consts:
            raise _err(f"{e.name!r} is not a compile-time constant", e)
        return consts[e.name]
    if isinstance(e, ast.Neg):
        return -eval_const_expr(e.operand, consts)
    if isinstance(e, ast.Binary):
        a, b = eval_const_expr(e.lhs, consts), eval_const_expr(e.rhs, consts)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        raise _err(f"operator {e.op!r} not allowed in constant expressions", e)
    if isinstance(e, ast.Call):
        if e.name != "isqrt" or len(e.args) != 1:
            raise _err(f"unknown builtin {e.name!r}", e)
        v = eval_const_expr(e.args[0], consts)
        r = math.isqrt(v) if v >= 0 else -1
        if r < 0 or r * r != v:
            raise _err(f"isqrt({v}) is not exact", e)
        return r
    raise _err("expected a constant expression", e)


def eval_consts(program: ast.Program, defines: Optional[dict[str, int]] = None) -> dict[str, int]:
    defines = dict(defines or {})
    consts: dict[str, int] = {}
    for c in program.consts:
        if c.name in consts:
            raise _err(f"constant {c.name!r} defined twice", c)
        consts[c.name] = defines.pop(c.name) if c.name in defines else eval_const_expr(c.value, consts)
    if defines:
        raise TypeCheckError(f"--define names unknown constants: {sorted(defines)}")
    return consts


class _Checker:
    def __init__(self, consts: dict[str, int]):
        self.consts = consts

    def resolve_type(self, spec: ast.TypeSpec) -> DslType:
        if spec.length is None:
            return DslType(spec.secret)
        n = eval_const_expr(spec.length, self.consts)
        if spec.secret and (n < 2 or n > MAX_SLOTS or n & (n - 1)):
            raise _err(f"secret vector length must be a power of two in [2, {MAX_SLOTS}], got {n}", spec)
        if n < 1:
            raise _err(f"array length must be positive, got {n}", spec)
        return DslType(spec.secret, n)

    def function(self, fn: ast.Function) -> TypedFunction:
        ret = self.resolve_type(fn.ret_type)
        ptypes = []
        self.scopes: list[dict[str, tuple[DslType, str]]] = [{}]
        self.tf = TypedFunction(fn, ptypes, ret, 1)
        self.width: Optional[int] = None
        for p in fn.params:
            ty = self.resolve_type(p.type)
            if ty.is_vector and not ty.secret:
                raise _err("plaintext vector parameters are not supported; use a constant array", p)
            if p.name in self.scopes[0] or p.name in self.consts:
                raise _err(f"parameter {p.name!r} shadows an existing name", p)
            self.note_width(ty, p)
            self.scopes[0][p.name] = (ty, "param")
            ptypes.append(ty)
        self.note_width(ret, fn.ret_type)
        if ret.is_vector and not ret.secret:
            raise _err("functions must return secret values", fn.ret_type)
        if not fn.body or not isinstance(fn.body[-1], ast.Return):
            raise _err(f"function {fn.name!r} must end with a return statement", fn)
        self.block(fn.body, top=True)
        self.tf.slots = self.width or 1
        return self.tf

    def note_width(self, ty: DslType, node) -> None:
        if ty.is_vector and ty.secret:
            if self.width is None:
                self.width = ty.length
            elif self.width != ty.length:
                raise _err(f"vector length {ty.length} differs from {self.width}; all secret vectors must match", node)

    def lookup(self, name: str, node) -> tuple[DslType, str]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.consts:
            return PLAIN, "const"
        raise _err(f"use of undeclared variable {name!r}", node)

    def declare(self, name: str, ty: DslType, kind: str, node) -> None:
        if name in self.scopes[-1] or name in self.consts:
            raise _err(f"{name!r} is already declared", node)
        self.scopes[-1][name] = (ty, kind)

    # statements

    def block(self, stmts: list, top: bool = False) -> None:
        for i, s in enumerate(stmts):
            if isinstance(s, ast.Return):
                if not top or i != len(stmts) - 1:
                    raise _err("return must be the last statement of the function body", s)
                self.ret(s)
            elif isinstance(s, ast.Decl):
                self.decl(s)
            elif isinstance(s, ast.Assign):
                self.assign(s)
            elif isinstance(s, ast.IndexAssign):
                self.index_assign(s)
            elif isinstance(s, ast.For):
                self.expr(s.lo)
                self.expr(s.hi)
                self.scopes.append({})
                self.declare(s.var, PLAIN, "loop", s)
                self.scopes.append({})
                self.block(s.body)
                self.scopes.pop()
                self.scopes.pop()
            else:
                raise _err("unknown statement", s)

    def check_assignable(self, target: DslType, value: DslType, node) -> None:
        if value.secret and not target.secret:
            raise _err("cannot assign a secret value to a plaintext variable", node)
        if target.length != value.length:
            raise _err(f"shape mismatch: cannot assign {value} to {target}", node)

    def decl(self, s: ast.Decl) -> None:
        ty = self.resolve_type(s.type)
        self.note_width(ty, s.type)
        if isinstance(s.init, ast.ArrayLit):
            if ty.secret or not ty.is_vector:
                raise _err("array literals initialise plaintext arrays only", s)
            if len(s.init.items) != ty.length:
                raise _err(f"array literal has {len(s.init.items)} items, expected {ty.length}", s)
            for item in s.init.items:
                if self.expr(item).secret:
                    raise _err("array literal items must be plaintext", item)
        elif s.init is not None:
            vt = self.expr(s.init)
            if ty.is_vector and not ty.secret:
                raise _err("plaintext arrays must be initialised with an array literal", s)
            self.check_assignable(ty, vt, s)
        self.tf.decl_types[id(s)] = ty
        self.declare(s.name, ty, "local", s)

    def _compound(self, op: str, target: DslType, value: DslType, node) -> DslType:
        if op == "=":
            return value
        return self.arith(op[0], target, value, node)

    def assign(self, s: ast.Assign) -> None:
        ty, kind = self.lookup(s.name, s)
        if kind in ("const", "loop"):
            raise _err(f"cannot assign to {kind} {s.name!r}", s)
        if ty.is_vector and not ty.secret:
            raise _err("plaintext arrays can only be updated element-wise", s)
        vt = self._compound(s.op, ty, self.expr(s.value), s)
        self.check_assignable(ty, vt, s)

    def index_assign(self, s: ast.IndexAssign) -> None:
        ty, _ = self.lookup(s.target.name, s)
        et = self.index(s.target)
        vt = self._compound(s.op, et, self.expr(s.value), s)
        self.check_assignable(DslType(ty.secret), vt, s)

    def ret(self, s: ast.Return) -> None:
        vt = self.expr(s.value)
        ret = self.tf.return_type
        if ret.length != vt.length:
            raise _err(f"return shape mismatch: {vt} returned from function declared {ret}", s)
        if vt.secret and not ret.secret:
            raise _err("cannot return a secret value from a plaintext function", s)

    # expressions

    def arith(self, op: str, a: DslType, b: DslType, node) -> DslType:
        secret = a.secret or b.secret
        if a.is_vector and b.is_vector:
            if a.length != b.length:
                raise _err(f"shape mismatch: {a} {op} {b}", node)
            return DslType(secret, a.length)
        if a.is_vector or b.is_vector:
            vec, sc = (a, b) if a.is_vector else (b, a)
            if sc.secret:
                raise _err("cannot combine a secret scalar with a whole vector", node)
            return DslType(secret, vec.length)
        return DslType(secret)

    def index(self, e: ast.Index) -> DslType:
        ty, _ = self.lookup(e.name, e)
        if not ty.is_vector:
            raise _err(f"cannot index scalar {e.name!r}", e)
        it = self.expr(e.index)
        if it.secret or it.is_vector:
            raise _err("index must be a plaintext scalar", e.index)
        if e.modulus is not None:
            mt = self.expr(e.modulus)
            if mt.secret or mt.is_vector:
                raise _err("index modulus must be a plaintext scalar", e.modulus)
        return DslType(ty.secret)

    def expr(self, e) -> DslType:
        ty = self._expr(e)
        self.tf.expr_types[id(e)] = ty
        return ty

    def _expr(self, e) -> DslType:
        if isinstance(e, ast.Literal):
            return PLAIN
        if isinstance(e, ast.Var):
            ty, _ = self.lookup(e.name, e)
            if ty.is_vector and not ty.secret:
                raise _err(f"plaintext array {e.name!r} can only be indexed", e)
            return ty
        if isinstance(e, ast.Neg):
            return self.expr(e.operand)
        if isinstance(e, ast.Index):
            return self.index(e)
        if isinstance(e, ast.Binary):
            a = self.expr(e.lhs)
            b = self.expr(e.rhs)
            if e.op == "<<":
                if not a.is_vector:
                    raise _err("rotation '<<' needs a vector on the left", e)
                if b.secret or b.is_vector:
                    raise _err("rotation amount must be a plaintext scalar", e.rhs)
                return a
            return self.arith(e.op, a, b, e)
        if isinstance(e, ast.Call):
            raise _err("builtin calls are only allowed in const definitions", e)
        raise _err("unknown expression", e)


def check_types(program: ast.Program, defines: Optional[dict[str, int]] = None,
                modulus: int = DEFAULT_MODULUS) -> TypedProgram:
    """Type-check ``program``; ``defines`` overrides top-level ``const`` values."""
    consts = eval_consts(program, defines)
    checker = _Checker(consts)
    names = set()
    functions = []
    for fn in program.functions:
        if fn.name in names:
            raise _err(f"function {fn.name!r} defined twice", fn)
        names.add(fn.name)
        functions.append(checker.function(fn))
    return TypedProgram(program, consts, functions, modulus)
