"""Direct interpretation of a checked program, vectorised over trials.

This is the oracle.  It walks the syntax tree, runs loops, and does slot
arithmetic with numpy; it shares no code with lowering or the passes.
Runtime values carry a leading trial axis: scalars are ``(B,)`` arrays and
vectors ``(B, n)`` arrays, all reduced mod t.  Compile-time integers stay
exact Python ints until they meet runtime data.
"""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from ..errors import BatchFheError
from ..frontend import ast
from ..frontend.typecheck import TypedFunction, TypedProgram


class InputError(BatchFheError):
    """Inputs missing or not matching the parameter shapes."""


class _Array(list):
    """Plaintext array (list of ints or runtime scalars)."""


class _Interp:
    def __init__(self, tf: TypedFunction, consts: dict[str, int], t: int, trials: int):
        self.tf = tf
        self.consts = consts
        self.t = t
        self.B = trials
        self.scopes: list[dict] = [{}]

    def lookup(self, name):
        for s in reversed(self.scopes):
            if name in s:
                return s[name]
        return self.consts[name]

    def store(self, name, v):
        for s in reversed(self.scopes):
            if name in s:
                s[name] = v
                return

    def num(self, v):
        """Runtime form of a value (reduced mod t)."""
        if isinstance(v, int):
            return np.full(self.B, v % self.t, dtype=np.int64)
        return v

    def op(self, o: str, a, b):
        if isinstance(a, int) and isinstance(b, int):
            return a + b if o == "+" else a - b if o == "-" else a * b
        a = a % self.t if isinstance(a, int) else a
        b = b % self.t if isinstance(b, int) else b
        if isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and a.ndim != b.ndim:
            # scalar (B,) against vector (B, n)
            if a.ndim == 1:
                a = a[:, None]
            else:
                b = b[:, None]
        if o == "+":
            r = a + b
        elif o == "-":
            r = a - b
        else:
            r = a * b
        return np.asarray(r % self.t, dtype=np.int64)

    def index(self, e: ast.Index) -> int:
        i = self.expr(e.index)
        if e.modulus is not None:
            i %= self.expr(e.modulus)
        return i

    def expr(self, e):
        if isinstance(e, ast.Literal):
            return e.value
        if isinstance(e, ast.Var):
            v = self.lookup(e.name)
            return v.copy() if isinstance(v, np.ndarray) else v
        if isinstance(e, ast.Neg):
            v = self.expr(e.operand)
            return -v if isinstance(v, int) else (-v) % self.t
        if isinstance(e, ast.Index):
            v = self.lookup(e.name)
            i = self.index(e)
            if isinstance(v, _Array):
                return v[i]
            return v[:, i].copy()
        if isinstance(e, ast.Binary):
            a, b = self.expr(e.lhs), self.expr(e.rhs)
            if e.op == "<<":
                return np.roll(a, -b, axis=1)
            return self.op(e.op, a, b)
        raise TypeError(f"cannot evaluate {e!r}")

    def block(self, stmts):
        for s in stmts:
            if isinstance(s, ast.Return):
                return self.expr(s.value)
            self.stmt(s)
        return None

    def stmt(self, s):
        if isinstance(s, ast.Decl):
            ty = self.tf.decl_types[id(s)]
            if isinstance(s.init, ast.ArrayLit):
                v = _Array(self.expr(x) for x in s.init.items)
            elif s.init is not None:
                v = self.expr(s.init)
                if ty.secret:
                    v = self.num(v)
            elif ty.is_vector and ty.secret:
                v = np.zeros((self.B, ty.length), dtype=np.int64)
            elif ty.is_vector:
                v = _Array([0] * ty.length)
            else:
                v = self.num(0) if ty.secret else 0
            self.scopes[-1][s.name] = v
        elif isinstance(s, ast.Assign):
            v = self.expr(s.value)
            if s.op != "=":
                v = self.op(s.op[0], self.lookup(s.name), v)
            self.store(s.name, v)
        elif isinstance(s, ast.IndexAssign):
            target = self.lookup(s.target.name)
            i = self.index(s.target)
            v = self.expr(s.value)
            if isinstance(target, _Array):
                if s.op != "=":
                    v = self.op(s.op[0], target[i], v)
                target[i] = v
            else:
                if s.op != "=":
                    v = self.op(s.op[0], target[:, i], v)
                target[:, i] = self.num(v) if isinstance(v, int) else v
        elif isinstance(s, ast.For):
            for k in range(self.expr(s.lo), self.expr(s.hi)):
                self.scopes.append({s.var: k})
                self.scopes.append({})
                self.block(s.body)
                self.scopes.pop()
                self.scopes.pop()

    def run(self, inputs: Mapping[str, np.ndarray]):
        for p, ty in zip(self.tf.node.params, self.tf.param_types):
            self.scopes[0][p.name] = np.asarray(inputs[p.name], dtype=np.int64) % self.t
        out = self.block(self.tf.node.body)
        if isinstance(out, int):
            out = self.num(out)
        return out


def normalise_inputs(tf: TypedFunction, inputs: Mapping[str, object]) -> tuple[dict[str, np.ndarray], int, bool]:
    """Coerce inputs to batched arrays; returns (arrays, trials, was_batched)."""
    arrays = {}
    batched = None
    for p, ty in zip(tf.node.params, tf.param_types):
        if p.name not in inputs:
            raise InputError(f"missing input {p.name!r}")
        a = np.asarray(inputs[p.name], dtype=np.int64)
        want = 1 if ty.is_vector else 0
        if a.ndim == want:
            is_b = False
            a = a[None]
        elif a.ndim == want + 1:
            is_b = True
        else:
            raise InputError(f"input {p.name!r} has shape {a.shape}, expected {ty}")
        if ty.is_vector and a.shape[1] != ty.length:
            raise InputError(f"input {p.name!r} has length {a.shape[1]}, expected {ty.length}")
        if batched is None:
            batched = is_b
        elif batched != is_b:
            raise InputError("mix of batched and single inputs")
        arrays[p.name] = a
    extra = set(inputs) - {p.name for p in tf.node.params}
    if extra:
        raise InputError(f"unexpected inputs {sorted(extra)}")
    sizes = {a.shape[0] for a in arrays.values()}
    if len(sizes) > 1:
        raise InputError(f"inconsistent trial counts {sorted(sizes)}")
    return arrays, sizes.pop() if sizes else 1, bool(batched)


def exec_reference(prog: TypedProgram, inputs: Mapping[str, object], name: Optional[str] = None):
    """Run the program on plain inputs.

    Each input is an int (scalar) or list (vector); a leading trial axis may
    be added to every input to evaluate many trials at once, in which case the
    result also carries it.  Results are ints / lists, or arrays when batched.
    """
    tf = prog.function(name)
    arrays, trials, batched = normalise_inputs(tf, inputs)
    out = _Interp(tf, prog.consts, prog.modulus, trials).run(arrays)
    if batched:
        return out
    return out[0].tolist() if out.ndim == 2 else int(out[0])
