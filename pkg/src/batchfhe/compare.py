"""Differential testing of the batched pipeline against the reference interpreter.

On a mismatch the failing input is shrunk greedily (zeroing blocks of
elements, then lowering values to 1) while the mismatch persists, and the
pipeline is replayed stage by stage on it to name the first stage whose
output disagrees with the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .ir.core import IrFunction
from .ir.passes import canonicalize, constant_fold
from .pipeline import PASSES, Compiled, PipelineConfig, compile_source
from .sim.inputs import random_inputs, trial
from .sim.interp import run_ir
from .sim.reference import exec_reference
from .sim.simulator import exec_circuit

MAX_CANDIDATES = 256
MAX_ROUNDS = 200


@dataclass
class Divergence:
    trial: int
    inputs: dict  # shrunk counterexample
    expected: object
    actual: object
    position: Optional[int]  # first differing output element, None for scalar results
    stage: Optional[str]  # first pipeline stage that disagrees with the reference

    def to_json(self) -> dict:
        return {"trial": self.trial, "inputs": self.inputs, "expected": self.expected, "actual": self.actual,
                "position": self.position, "stage": self.stage}


@dataclass
class CompareResult:
    name: str
    trials: int
    passed: bool
    divergence: Optional[Divergence] = None
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "trials": self.trials, "passed": self.passed,
                "divergence": self.divergence.to_json() if self.divergence else None, "warnings": self.warnings}


def _mismatch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-trial inequality of two batched results."""
    neq = np.asarray(a) != np.asarray(b)
    return neq.reshape(neq.shape[0], -1).any(axis=1)


def stage_functions(comp: Compiled, pc: PipelineConfig):
    """Replay the IR pipeline, yielding (stage name, function) after each step."""
    f: IrFunction = comp.ir
    yield "lower", f
    f = canonicalize(constant_fold(f))
    yield "normalize", f
    for k, p in enumerate(pc.active()):
        f = PASSES[p](f)
        yield f"{p}#{k}", f


def compare_compiled(comp: Compiled, pc: PipelineConfig, trials: int = 100, seed: int = 0,
                     shrink: bool = True) -> CompareResult:
    prog = comp.program
    tf = prog.function(comp.ir.name)
    name = comp.ir.name
    if trials <= 0:
        return CompareResult(name, 0, True, warnings=["no trials requested; equivalence was not checked"])
    t = prog.modulus
    rng = np.random.default_rng(seed)
    inputs = random_inputs(tf, trials, t, rng)

    def reference(x):
        return exec_reference(prog, x, name)

    def check(x) -> np.ndarray:
        return _mismatch(reference(x), exec_circuit(comp.circuit, x).outputs)

    bad = np.flatnonzero(check(inputs))
    if not len(bad):
        return CompareResult(name, trials, True)
    k = int(bad[0])
    x = {p: v[k:k + 1].copy() for p, v in inputs.items()}
    if shrink:
        x = shrink_input(x, check)
    expected = reference(x)
    actual = exec_circuit(comp.circuit, x).outputs
    position = None
    if np.ndim(expected) == 2:
        position = int(np.flatnonzero(expected[0] != actual[0])[0])
    stage = "circuit"
    for sname, f in stage_functions(comp, pc):
        if _mismatch(expected, run_ir(f, x)).any():
            stage = sname
            break
    div = Divergence(k, trial(x, 0), _plain(expected[0]), _plain(actual[0]), position, stage)
    return CompareResult(name, trials, False, div)


def compare_source(source: str, pc: Optional[PipelineConfig] = None, trials: int = 100, seed: int = 0,
                   name: Optional[str] = None, shrink: bool = True) -> CompareResult:
    pc = pc or PipelineConfig()
    return compare_compiled(compile_source(source, pc, name), pc, trials, seed, shrink)


def _plain(v):
    return [int(a) for a in v] if np.ndim(v) else int(v)


def shrink_input(x: dict[str, np.ndarray], diverges: Callable[[dict], np.ndarray]) -> dict[str, np.ndarray]:
    """Greedily simplify a one-trial input while ``diverges`` keeps reporting a mismatch.

    Candidates for a round are evaluated together as one batch of trials.
    """
    names = list(x)
    cells = [(p, j) for p in names for j in (range(x[p].shape[1]) if x[p].ndim == 2 else [None])]

    def get(cur, cell):
        p, j = cell
        return cur[p][0] if j is None else cur[p][0, j]

    def put(cur, cells_, value):
        out = {p: v.copy() for p, v in cur.items()}
        for p, j in cells_:
            if j is None:
                out[p][0] = value
            else:
                out[p][0, j] = value
        return out

    def attempt(cur, groups, value):
        """Try each group; accept all successful ones together if that still fails, else the first."""
        cands = [put(cur, g, value) for g in groups[:MAX_CANDIDATES]]
        if not cands:
            return None
        batch = {p: np.concatenate([c[p] for c in cands]) for p in names}
        ok = np.flatnonzero(diverges(batch))
        if not len(ok):
            return None
        merged = put(cur, [cell for i in ok for cell in groups[i]], value)
        if len(ok) > 1 and diverges(merged)[0]:
            return merged
        return cands[ok[0]]

    cur = x
    rounds = 0
    size = len(cells)
    while size >= 1 and rounds < MAX_ROUNDS:
        groups = [g for g in (cells[k:k + size] for k in range(0, len(cells), size))
                  if any(get(cur, c) != 0 for c in g)]
        nxt = attempt(cur, groups, 0)
        rounds += 1
        if nxt is None:
            size //= 2
        else:
            cur = nxt
    while rounds < MAX_ROUNDS:
        groups = [[c] for c in cells if get(cur, c) > 1]
        nxt = attempt(cur, groups, 1)
        rounds += 1
        if nxt is None:
            break
        cur = nxt
    return cur
