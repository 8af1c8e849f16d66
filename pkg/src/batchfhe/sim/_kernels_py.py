"""Pure numpy tape executor; same contract as the compiled ``_kernels.run_tape``."""

from __future__ import annotations

import numpy as np

from .tape import OP_ADD, OP_COPY, OP_MUL, OP_NEG, OP_ROT, OP_SUB


def run_tape(mem: np.ndarray, consts: np.ndarray, tape: np.ndarray, t: int) -> None:
    """Execute ``tape`` rows (op, dst, a, b, k) in place on ``mem`` of shape (values, trials, slots).

    A negative ``b`` reads row ``-1 - b`` of ``consts`` (shape (constants, slots)) in every trial.
    """
    for op, dst, a, b, k in tape.tolist():
        rb = mem[b] if b >= 0 else consts[-1 - b]
        if op == OP_ADD:
            r = mem[a] + rb
            r[r >= t] -= t
            mem[dst] = r
        elif op == OP_SUB:
            r = mem[a] - rb
            r[r < 0] += t
            mem[dst] = r
        elif op == OP_MUL:
            np.multiply(mem[a], rb, out=mem[dst])
            np.remainder(mem[dst], t, out=mem[dst])
        elif op == OP_NEG:
            r = t - mem[a]
            r[r == t] = 0
            mem[dst] = r
        elif op == OP_ROT:
            mem[dst] = np.roll(mem[a], -k, axis=1)
        elif op == OP_COPY:
            mem[dst] = mem[a]
        else:
            raise ValueError(f"bad opcode {op}")
