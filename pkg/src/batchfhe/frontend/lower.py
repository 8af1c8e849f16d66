"""Lowering of a checked program to straight-line high-level IR.

Loops are unrolled completely and every index is evaluated to a slot
number.  Plaintext scalars that are known at compile time stay Python ints
(exact, unreduced, so index arithmetic can go negative); only when they meet
a secret value are they emitted as ``hl.const`` reduced mod t.

Whole-vector expressions are lowered element by element: ``x << k`` is a
re-indexing of the element list and never emits an op.  The only vector that
is ever materialised is the one returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import TypeCheckError, UnrollError
from ..ir.core import PINT_T, SINT_T, IrFunction, IrOp, IrType, Param, pvec_t, tensor_t
from . import ast
from .typecheck import TypedFunction, TypedProgram


@dataclass(frozen=True)
class _Ref:
    """A runtime IR value."""

    id: int


Scalar = Union[int, _Ref]


@dataclass
class _Vec:
    """Secret vector: element j is ``elems[j]`` or else ``base[(j + shift) mod n]``.

    ``base`` None means the all-zero vector.
    """

    n: int
    base: Optional[int] = None
    shift: int = 0
    elems: dict[int, Scalar] = field(default_factory=dict)

    def copy(self) -> "_Vec":
        return _Vec(self.n, self.base, self.shift, dict(self.elems))


Value = Union[Scalar, _Vec, list]  # list = plaintext array


def _err(cls, msg: str, node):
    sp = getattr(node, "span", None)
    return cls(msg, sp.line if sp else 0, sp.column if sp else 0)


class _Lowerer:
    def __init__(self, tf: TypedFunction, consts: dict[str, int], modulus: int):
        self.tf = tf
        self.consts = consts
        self.t = modulus
        self.n = tf.slots
        self.ops: list[IrOp] = []
        self.types: dict[int, IrType] = {}
        self.next_id = 0
        self.scopes: list[dict[str, Value]] = [{}]

    # emission

    def emit(self, name: str, operands: tuple, ty: IrType, attrs: tuple = ()) -> _Ref:
        r = self.next_id
        self.next_id += 1
        self.ops.append(IrOp(r, name, tuple(operands), attrs, ty))
        self.types[r] = ty
        return _Ref(r)

    def as_ref(self, v: Scalar) -> _Ref:
        if isinstance(v, _Ref):
            return v
        return self.emit("hl.const", (), PINT_T, (("value", v % self.t),))

    def is_secret(self, v: Scalar) -> bool:
        return isinstance(v, _Ref) and self.types[v.id].is_secret

    def element(self, vec: _Vec, j: int) -> Scalar:
        if j in vec.elems:
            return vec.elems[j]
        if vec.base is None:
            return 0
        slot = (j + vec.shift) % vec.n
        return self.emit("hl.extract", (vec.base,), SINT_T, (("slot", slot),))

    # scopes

    def lookup(self, name: str) -> Value:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.consts[name]

    def bind(self, name: str, v: Value) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = v
                return
        raise KeyError(name)  # unreachable after type checking

    # scalar arithmetic

    def arith(self, op: str, a: Scalar, b: Scalar, node) -> Scalar:
        if isinstance(a, int) and isinstance(b, int):
            return a + b if op == "+" else a - b if op == "-" else a * b
        if not (self.is_secret(a) or self.is_secret(b)):
            raise _err(TypeCheckError, "arithmetic on runtime plaintext values is not supported; "
                       "combine plaintext parameters with secret values only", node)
        ra, rb = self.as_ref(a), self.as_ref(b)
        name = {"+": "hl.add", "-": "hl.sub", "*": "hl.mul"}[op]
        return self.emit(name, (ra.id, rb.id), SINT_T)

    def negate(self, a: Scalar, node) -> Scalar:
        if isinstance(a, int):
            return -a
        if not self.is_secret(a):
            raise _err(TypeCheckError, "arithmetic on runtime plaintext values is not supported", node)
        return self.emit("hl.mul", (a.id, self.as_ref(self.t - 1).id), SINT_T)

    # expressions

    def const_int(self, e, what: str) -> int:
        v = self.expr(e)
        if not isinstance(v, int):
            raise _err(UnrollError, f"{what} is not a compile-time constant", e)
        return v

    def slot(self, e: ast.Index, length: int) -> int:
        i = self.const_int(e.index, "index")
        if e.modulus is not None:
            m = self.const_int(e.modulus, "index modulus")
            if m <= 0:
                raise _err(UnrollError, f"index modulus must be positive, got {m}", e)
            i %= m
        if not 0 <= i < length:
            raise _err(UnrollError, f"index {i} out of range [0, {length})", e)
        return i

    def expr(self, e) -> Value:
        if isinstance(e, ast.Literal):
            return e.value
        if isinstance(e, ast.Var):
            v = self.lookup(e.name)
            return v.copy() if isinstance(v, _Vec) else v
        if isinstance(e, ast.Neg):
            v = self.expr(e.operand)
            if isinstance(v, _Vec):
                return self.map_vec(v, lambda x: self.negate(x, e))
            return self.negate(v, e)
        if isinstance(e, ast.Index):
            v = self.lookup(e.name)
            if isinstance(v, _Vec):
                return self.element(v, self.slot(e, v.n))
            return v[self.slot(e, len(v))]
        if isinstance(e, ast.Binary):
            a = self.expr(e.lhs)
            b = self.expr(e.rhs)
            if e.op == "<<":
                return self.rotate(a, self.const_int_value(b, e.rhs))
            return self.binary(e.op, a, b, e)
        raise _err(TypeCheckError, "unsupported expression", e)

    def const_int_value(self, v: Value, node) -> int:
        if not isinstance(v, int):
            raise _err(UnrollError, "rotation amount is not a compile-time constant", node)
        return v

    def rotate(self, v: _Vec, k: int) -> _Vec:
        n = v.n
        if not v.elems:
            return _Vec(n, v.base, (v.shift + k) % n)
        return _Vec(n, None, 0, {j: self.element(v, (j + k) % n) for j in range(n)})

    def map_vec(self, v: _Vec, fn) -> _Vec:
        return _Vec(v.n, None, 0, {j: fn(self.element(v, j)) for j in range(v.n)})

    def binary(self, op: str, a: Value, b: Value, node) -> Value:
        if isinstance(a, _Vec) and isinstance(b, _Vec):
            return _Vec(a.n, None, 0, {j: self.arith(op, self.element(a, j), self.element(b, j), node)
                                       for j in range(a.n)})
        if isinstance(a, _Vec):
            return self.map_vec(a, lambda x: self.arith(op, x, b, node))
        if isinstance(b, _Vec):
            return self.map_vec(b, lambda x: self.arith(op, a, x, node))
        return self.arith(op, a, b, node)

    # statements

    def block(self, stmts: list) -> None:
        for s in stmts:
            self.stmt(s)

    def stmt(self, s) -> None:
        if isinstance(s, ast.Decl):
            ty = self.tf.decl_types[id(s)]
            if isinstance(s.init, ast.ArrayLit):
                v: Value = [self.expr(item) for item in s.init.items]
            elif s.init is not None:
                v = self.expr(s.init)
            elif ty.is_vector:
                v = _Vec(ty.length) if ty.secret else [0] * ty.length
            else:
                v = 0
            self.scopes[-1][s.name] = v
        elif isinstance(s, ast.Assign):
            v = self.expr(s.value)
            if s.op != "=":
                v = self.binary(s.op[0], self.lookup(s.name), v, s)
            self.bind(s.name, v)
        elif isinstance(s, ast.IndexAssign):
            target = self.lookup(s.target.name)
            length = target.n if isinstance(target, _Vec) else len(target)
            j = self.slot(s.target, length)
            v = self.expr(s.value)
            if s.op != "=":
                old = self.element(target, j) if isinstance(target, _Vec) else target[j]
                v = self.arith(s.op[0], old, v, s)
            if isinstance(target, _Vec):
                target.elems[j] = v
            else:
                target[j] = v
        elif isinstance(s, ast.For):
            lo = self.const_int(s.lo, "loop bound")
            hi = self.const_int(s.hi, "loop bound")
            for i in range(lo, hi):
                self.scopes.append({s.var: i})
                self.scopes.append({})
                self.block(s.body)
                self.scopes.pop()
                self.scopes.pop()
        elif isinstance(s, ast.Return):
            self.ret = self.expr(s.value)
        else:
            raise _err(TypeCheckError, "unsupported statement", s)

    def materialize(self, v: _Vec) -> int:
        """Emit the insert chain that realises ``v`` as one tensor value."""
        n = v.n
        if not v.elems and v.shift == 0 and v.base is not None:
            return v.base
        if v.shift == 0 or len(v.elems) == n:
            writes = dict(v.elems)
        else:
            writes = {j: self.element(v, j) for j in range(n)}
        base = v.base if v.shift == 0 else None
        if base is None:
            base = self.emit("bsf.splat", (), pvec_t(n), (("value", 0),)).id
        cur = base
        for j, x in writes.items():
            cur = self.emit("hl.insert", (self.as_ref(x).id, cur), tensor_t(n), (("slot", j),)).id
        return cur

    def run(self) -> IrFunction:
        fn = self.tf.node
        params = []
        for p, ty in zip(fn.params, self.tf.param_types):
            pid = self.next_id
            self.next_id += 1
            if ty.is_vector:
                irt = tensor_t(ty.length)
                self.scopes[0][p.name] = _Vec(ty.length, pid)
            else:
                irt = SINT_T if ty.secret else PINT_T
                self.scopes[0][p.name] = _Ref(pid)
            self.types[pid] = irt
            params.append(Param(pid, p.name, irt, "vector" if ty.is_vector else "scalar"))
        self.ret: Optional[Value] = None
        self.block(fn.body)
        if isinstance(self.ret, _Vec):
            ret = self.materialize(self.ret)
        else:
            ret = self.as_ref(self.ret).id
        layout = "vector" if self.tf.return_type.is_vector else "scalar"
        return IrFunction(fn.name, tuple(params), tuple(self.ops), ret, layout, self.n, self.t)


def lower_function(prog: TypedProgram, name: Optional[str] = None) -> IrFunction:
    """Lower one function (the entry point by default)."""
    return _Lowerer(prog.function(name), prog.consts, prog.modulus).run()


def lower_to_ir(prog: TypedProgram) -> dict[str, IrFunction]:
    """Lower every function of ``prog``, keyed by name."""
    return {tf.name: _Lowerer(tf, prog.consts, prog.modulus).run() for tf in prog.functions}
