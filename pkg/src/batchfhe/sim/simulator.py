"""Slot-level simulation of batched circuits with an abstract noise counter.

Ciphertexts are n-slot vectors mod t.  Rotation follows
``rotate(v, k)[j] = v[(j + k) mod n]`` and noise grows by the deterministic
rules of :mod:`batchfhe.backend.analysis`.  Decryption fails exactly when a
ciphertext's noise exceeds the parameter set's budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from ..backend.analysis import SchemeParams, analyze_noise, op_noise, select_parameters, circuit_depth
from ..backend.circuit import CT_MUL, PT_CONST, RELIN, ROTATE, CircuitFunction
from ..config import Config, default_config
from ..errors import NoiseBudgetExceeded, ParameterError
from .kernels import run_tape
from .reference import InputError
from .tape import build_tape

# memory ceiling for one chunk of trials, in bytes
CHUNK_BYTES = 64 << 20
TRACE_SLOTS = 16


@dataclass
class SimCiphertext:
    slots: np.ndarray  # (n,) int64 in [0, t)
    noise: int = 1
    relinearized: bool = True


def encrypt_sim(value: Union[int, Sequence[int]], p: SchemeParams, cfg: Optional[Config] = None) -> SimCiphertext:
    """Encode a scalar at slot 0 or a vector from slot 0 on; unused slots are 0."""
    cfg = cfg or default_config()
    n = p.slots
    if n < 1:
        raise ValueError("parameter set has no slot count")
    slots = np.zeros(n, dtype=np.int64)
    if np.ndim(value) == 0:
        slots[0] = int(value) % p.modulus
    else:
        v = np.asarray(value, dtype=np.int64)
        if v.ndim != 1:
            raise InputError("only scalars and 1-d vectors can be encrypted")
        if len(v) > n:
            raise InputError(f"vector of length {len(v)} does not fit in {n} slots")
        slots[:len(v)] = v % p.modulus
    return SimCiphertext(slots, cfg.noise["fresh"], True)


def decrypt_sim(ct: SimCiphertext, p: SchemeParams, shape: str = "vector") -> Union[int, list[int]]:
    """Slot 0 for ``scalar``, every slot for ``vector``; fails when noise exceeds the budget."""
    if ct.noise > p.budget:
        raise NoiseBudgetExceeded(ct.noise, p.budget)
    if shape == "scalar":
        return int(ct.slots[0])
    if shape == "vector":
        return [int(x) for x in ct.slots]
    raise ValueError(f"unknown shape {shape!r}")


def apply_op(kind: str, args: Sequence[Union[SimCiphertext, np.ndarray]], t: int,
             rotation: int = 0, cfg: Optional[Config] = None) -> SimCiphertext:
    """One native op on single ciphertexts; plaintext operands are plain slot arrays."""
    cfg = cfg or default_config()
    a = args[0]
    if not isinstance(a, SimCiphertext):
        raise TypeError("the first operand must be a ciphertext")
    vals = [x.slots if isinstance(x, SimCiphertext) else np.asarray(x, dtype=np.int64) for x in args]
    noise = op_noise(kind, [x.noise for x in args if isinstance(x, SimCiphertext)], cfg)
    relin = all(x.relinearized for x in args if isinstance(x, SimCiphertext))
    if kind == ROTATE:
        out = np.roll(vals[0], -rotation)
    elif kind == RELIN:
        out, relin = vals[0].copy(), True
    elif kind.endswith("add"):
        out = (vals[0] + vals[1]) % t
    elif kind.endswith("sub"):
        out = (vals[0] - vals[1]) % t
    elif kind.endswith("mul"):
        out = (vals[0] * vals[1]) % t
        relin = relin and kind != CT_MUL
    elif kind == "negate":
        out = (-vals[0]) % t
    else:
        raise ValueError(f"unknown op kind {kind!r}")
    return SimCiphertext(out, noise, relin)


@dataclass
class ExecutionTrace:
    outputs: np.ndarray  # (B,) scalar results or (B, m) vectors
    peak_noise: int
    budget: int
    decrypt_ok: bool
    noise: dict[int, int]  # ciphertext value id -> noise
    relinearized: dict[int, bool]  # output id -> flag
    values: Optional[dict[int, np.ndarray]] = None  # value id -> slots of the first trial
    circuit: Optional[CircuitFunction] = None
    batched: bool = True

    def decrypt(self) -> np.ndarray:
        if not self.decrypt_ok:
            raise NoiseBudgetExceeded(self.peak_noise, self.budget)
        return self.outputs

    def result(self):
        """Decrypted outputs of a single (non-batched) run as JSON-able values."""
        out = self.decrypt()
        first = out[0] if self.batched else out
        return [int(x) for x in first] if np.ndim(first) else int(first)

    def dump(self, full: bool = False) -> str:
        """One line per op: ``%id kind noise=<u> slots=[...]`` (slots elided for wide vectors)."""
        if self.values is None or self.circuit is None:
            raise ValueError("trace values were not recorded; run with trace=True")
        lines = []
        for op in self.circuit.ops:
            slots = self.values[op.id]
            if len(slots) > TRACE_SLOTS and not full:
                shown = " ".join(str(int(x)) for x in slots[:TRACE_SLOTS // 2]) + f" ... ({len(slots)} slots)"
            else:
                shown = " ".join(str(int(x)) for x in slots)
            noise = self.noise.get(op.id, 0)
            lines.append(f"%{op.id} {op.kind} noise={noise} slots=[{shown}]")
        return "\n".join(lines)


def _encode_inputs(c: CircuitFunction, inputs: Mapping[str, object], t: int) -> tuple[dict[int, np.ndarray], int, bool]:
    """Per circuit input, a ``(B, slots)`` array; also the trial count and whether inputs were batched."""
    S = c.slots
    arrays: dict[str, np.ndarray] = {}
    batched = None
    names = {i.name: i for i in c.inputs}
    for name, i in names.items():
        if name not in inputs:
            raise InputError(f"missing input {name!r}")
        a = np.asarray(inputs[name], dtype=np.int64) % t
        vector = i.layout == "vector"
        single = a.ndim == (1 if vector else 0)
        if a.ndim != (2 if vector else 1) and not single:
            raise InputError(f"input {name!r} has the wrong shape {a.shape}")
        if single:
            a = a[None]
        if batched is None:
            batched = not single
        elif batched == single:
            raise InputError("mix of batched and single inputs")
        arrays[name] = a
    B = {a.shape[0] for a in arrays.values()}
    if len(B) > 1:
        raise InputError("inputs disagree on the number of trials")
    trials = B.pop() if B else 1
    enc: dict[int, np.ndarray] = {}
    for i in c.inputs:
        a = arrays[i.name]
        out = np.zeros((trials, S), dtype=np.int64)
        if i.element is not None:
            if i.element < a.shape[1]:
                out[:, 0] = a[:, i.element]
        elif i.layout == "vector":
            if a.shape[1] > S:
                raise InputError(f"input {i.name!r} has {a.shape[1]} elements for {S} slots")
            out[:, :a.shape[1]] = a
        elif i.kind == "pt":
            out[:] = a[:, None]  # plaintext scalars fill every slot
        else:
            out[:, 0] = a
        enc[i.id] = out
    return enc, trials, bool(batched) if batched is not None else False


def _relin_flags(c: CircuitFunction) -> dict[int, bool]:
    flag: dict[int, bool] = {i.id: True for i in c.inputs}
    for op in c.ops:
        if op.kind == PT_CONST:
            flag[op.id] = True
        elif op.kind == RELIN:
            flag[op.id] = True
        else:
            flag[op.id] = op.kind != CT_MUL and all(flag[v] for v in op.operands)
    return flag


def exec_circuit(c: CircuitFunction, inputs: Mapping[str, object], p: Optional[SchemeParams] = None,
                 trace: bool = False, cfg: Optional[Config] = None) -> ExecutionTrace:
    """Run ``c`` on one input set or a batch of them (leading axis = trials).

    Without ``p`` the smallest sufficient parameter row is used; if none fits,
    the largest row is used so the trace reports the failure.
    """
    cfg = cfg or default_config()
    t = c.modulus
    noise = analyze_noise(c, cfg)
    peak = max(noise.values(), default=0)
    if p is None:
        try:
            p = select_parameters(circuit_depth(c), peak, c.slots, cfg)
        except ParameterError:
            row = cfg.parameters[-1]
            p = SchemeParams(row.name, c.slots, t, row.budget)
    enc, trials, batched = _encode_inputs(c, inputs, t)
    tape = build_tape(c, reuse=not trace)
    S = c.slots
    chunk = trials if trace else max(1, min(trials, CHUNK_BYTES // max(1, tape.rows * S * 8)))
    outs = np.zeros((trials, len(c.outputs), S), dtype=np.int64)
    values = None
    mem = None
    for lo in range(0, trials, chunk):
        hi = min(trials, lo + chunk)
        if mem is None or mem.shape[1] != hi - lo:
            # every row is written before it is read, so no zeroing is needed
            mem = np.empty((tape.rows, hi - lo, S), dtype=np.int64)
        for iid, row in tape.inputs.items():
            mem[row] = enc[iid][lo:hi]
        run_tape(mem, tape.consts, tape.code, t)
        for k, o in enumerate(c.outputs):
            outs[lo:hi, k] = mem[tape.row_of[o]]
        if trace and lo == 0:
            values = {v: tape.value(mem, v).copy() for v in tape.row_of}
    if S == 1 and c.output_layout == "vector":
        result = outs[:, :, 0]  # one ciphertext per element
    elif c.output_layout == "vector":
        result = outs[:, 0, :]
    else:
        result = outs[:, 0, 0]  # scalars live in slot 0
    if not batched:
        result = result[0]
    flags = _relin_flags(c)
    return ExecutionTrace(result, peak, p.budget, peak <= p.budget, noise,
                          {o: flags[o] for o in c.outputs}, values, c, batched)
