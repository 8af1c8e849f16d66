"""Flattening of a circuit into a register tape for the slot kernels.

Each tape row is ``(op, dst, a, b, k)`` over rows of a ``(rows, trials, slots)``
int64 memory.  Plaintext constants are the same in every trial, so they live
in a separate ``(constants, slots)`` table; a negative ``b`` names entry
``-1 - b`` of that table.  Relinearizations only touch the noise model, so
they alias their operand and emit nothing.  Unless every value must stay
inspectable, rows are recycled once their value is dead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..backend.circuit import (CT_ADD, CT_MUL, CT_SUB, NEGATE, PT_ADD, PT_CONST, PT_MUL, PT_SUB, RELIN, ROTATE,
                               CircuitFunction)

OP_COPY, OP_ADD, OP_SUB, OP_MUL, OP_NEG, OP_ROT = range(6)

_OPCODE = {CT_ADD: OP_ADD, PT_ADD: OP_ADD, CT_SUB: OP_SUB, PT_SUB: OP_SUB,
           CT_MUL: OP_MUL, PT_MUL: OP_MUL, NEGATE: OP_NEG, ROTATE: OP_ROT}


@dataclass
class Tape:
    rows: int
    code: np.ndarray  # (ops, 5) int64
    row_of: dict[int, int]  # value id -> memory row, or -1 - table index for constants
    inputs: dict[int, int]  # circuit input id -> row
    consts: np.ndarray  # (constants, slots) int64

    def value(self, mem: np.ndarray, v: int, trial: int = 0) -> np.ndarray:
        r = self.row_of[v]
        return self.consts[-1 - r] if r < 0 else mem[r, trial]


def build_tape(c: CircuitFunction, reuse: bool = True) -> Tape:
    alias: dict[int, int] = {}

    def root(v: int) -> int:
        while v in alias:
            v = alias[v]
        return v

    for op in c.ops:
        if op.kind == RELIN:
            alias[op.id] = root(op.operands[0])

    last: dict[int, int] = {}
    for k, op in enumerate(c.ops):
        for v in op.operands:
            last[root(v)] = k
    pinned = {root(o) for o in c.outputs}

    row_of: dict[int, int] = {}
    free: list[int] = []
    count = 0

    def alloc() -> int:
        nonlocal count
        if reuse and free:
            return free.pop()
        count += 1
        return count - 1

    def release(k: int, operands) -> None:
        if not reuse:
            return
        for v in set(map(root, operands)):
            if last.get(v) == k and v not in pinned and row_of[v] >= 0:
                free.append(row_of[v])

    inputs = {}
    for i in c.inputs:
        row_of[i.id] = inputs[i.id] = alloc()
    table = []
    for op in c.ops:
        if op.kind == PT_CONST:
            row_of[op.id] = -1 - len(table)
            table.append(op.values)
    for v in list(inputs):
        if reuse and v not in last and v not in pinned:
            free.append(row_of[v])

    code = []
    for k, op in enumerate(c.ops):
        if op.kind in (PT_CONST, RELIN):
            if op.kind == RELIN:
                row_of[op.id] = row_of[root(op.id)]
                release(k, op.operands)
            continue
        a = row_of[root(op.operands[0])]
        b = row_of[root(op.operands[1])] if len(op.operands) > 1 else 0
        if a < 0:
            raise ValueError(f"op %{op.id}: a plaintext constant cannot be the first operand")
        dst = alloc()
        row_of[op.id] = dst
        code.append((_OPCODE[op.kind], dst, a, b, op.rotation or 0))
        release(k, op.operands)
        if reuse and op.id not in last and op.id not in pinned:
            free.append(dst)
    arr = np.asarray(code, dtype=np.int64).reshape(-1, 5)
    consts = np.asarray(table, dtype=np.int64).reshape(len(table), c.slots)
    return Tape(count, arr, row_of, inputs, consts)
