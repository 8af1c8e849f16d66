"""Interpreter for IR functions at any stage (``hl``, mixed, ``bsf``).

Used as the semantic oracle when checking that a pass preserves behaviour.
Vector values are ``(B, n)`` arrays, scalar values ``(B,)`` arrays.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..ir.core import PVEC, IrFunction
from .reference import InputError


def encode_param(value: np.ndarray, is_vector_type: bool, layout: str, kind: str, n: int) -> np.ndarray:
    """Place a ``(B,)`` or ``(B, n)`` input into the form the parameter type expects."""
    if not is_vector_type:
        return value
    if layout == "vector":
        return value
    out = np.zeros((value.shape[0], n), dtype=np.int64)
    if kind == PVEC:
        out[:] = value[:, None]  # plaintext scalars are broadcast to every slot
    else:
        out[:, 0] = value
    return out


def run_ir(f: IrFunction, inputs: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate ``f`` on batched inputs (one ``(B,)`` / ``(B, n)`` array per parameter).

    Returns ``(B,)`` for a scalar result (slot 0 when the value is batched)
    and ``(B, n)`` for a vector result.
    """
    t, n = f.modulus, f.slots
    env: dict[int, np.ndarray] = {}
    trials = None
    for p in f.params:
        if p.name not in inputs:
            raise InputError(f"missing input {p.name!r}")
        a = np.asarray(inputs[p.name], dtype=np.int64) % t
        trials = a.shape[0]
        env[p.id] = encode_param(a, p.type.is_vector, p.layout, p.type.kind, n)
    B = trials or 1

    def full(a: np.ndarray) -> np.ndarray:
        return np.broadcast_to(a, (B, n)).copy()

    for op in f.ops:
        args = [env[v] for v in op.operands]
        name = op.name
        if name == "hl.const":
            r = np.full(1, op.attr("value"), dtype=np.int64)
        elif name == "bsf.splat":
            r = np.full((1, n), op.attr("value"), dtype=np.int64)
        elif name == "bsf.vconst":
            r = np.asarray(op.attr("values"), dtype=np.int64)[None, :]
        elif name == "hl.extract":
            r = args[0][:, op.attr("slot")]
        elif name == "hl.insert":
            r = full(args[1])
            r[:, op.attr("slot")] = args[0]
        elif name == "bsf.rotate":
            r = np.roll(args[0], -op.attr("offset"), axis=1)
        elif op.kind in ("add", "mul"):
            r = args[0]
            for a in args[1:]:
                r = (r + a) % t if op.kind == "add" else (r * a) % t
        elif op.kind == "sub":
            r = (args[0] - args[1]) % t
        else:
            raise ValueError(f"cannot interpret {name}")
        env[op.result] = r
    out = env[f.ret]
    ret_t = f.type_of(f.ret)
    if ret_t.is_vector:
        out = full(out)
        if f.ret_layout == "scalar":
            out = out[:, 0]
    else:
        out = np.broadcast_to(out, (B,)).copy()
    return out % t

