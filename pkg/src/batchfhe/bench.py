"""Naive vs batched benchmark rows: op counts, ratios, correctness, compile time."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .backend.analysis import CostReport
from .backend.circuit import ROTATE, CT_MUL, PT_MUL
from .corpus import CorpusEntry
from .pipeline import Compiled, PipelineConfig, compile_naive, compile_source
from .sim.inputs import random_inputs
from .sim.reference import exec_reference
from .sim.simulator import exec_circuit


@dataclass
class BenchResult:
    name: str
    n: int
    naive: CostReport
    batched: CostReport
    ratios: dict[str, Optional[float]]  # naive / batched count, per kind and "total"
    correct: bool
    compile_ms: dict[str, float]  # pipeline -> trimmed-mean wall clock
    trials: int

    @property
    def verdict(self) -> str:
        return "ok" if self.correct else "FAILED"

    def to_json(self, timings: bool = True) -> dict:
        d = {
            "name": self.name,
            "n": self.n,
            "naive": self.naive.to_json(),
            "batched": self.batched.to_json(),
            "ratios": self.ratios,
            "correct": self.correct,
            "trials": self.trials,
        }
        if timings:
            d["compile_ms"] = {k: round(v, 3) for k, v in self.compile_ms.items()}
        else:
            for side in ("naive", "batched"):
                d[side].pop("compile_ms", None)
        return d


def trimmed_mean(samples: list[float]) -> float:
    """Mean after dropping the single largest and smallest sample (when at least three)."""
    s = sorted(samples)
    if len(s) >= 3:
        s = s[1:-1]
    return statistics.fmean(s)


def _ratio(a: int, b: int) -> Optional[float]:
    return round(a / b, 3) if b else None


def _timed(fn, runs: int) -> tuple[Compiled, float]:
    times = []
    out = None
    for _ in range(max(1, runs)):
        t0 = time.perf_counter()
        out = fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return out, trimmed_mean(times)


def run_benchmark(entry: CorpusEntry, n: int, pc: Optional[PipelineConfig] = None, trials: int = 100,
                  seed: int = 0, compile_runs: int = 3) -> BenchResult:
    """Compile both pipelines at size ``n`` and check both circuits against the reference."""
    pc = replace(pc or PipelineConfig(), defines={**(pc.defines if pc else {}), **entry.defines(n)})
    src = entry.source()
    batched, b_ms = _timed(lambda: compile_source(src, pc), compile_runs)
    naive, n_ms = _timed(lambda: compile_naive(src, pc), compile_runs)
    prog = batched.program
    correct = True
    if trials > 0:
        rng = np.random.default_rng(seed)
        inputs = random_inputs(prog.function(batched.ir.name), trials, prog.modulus, rng)
        expected = exec_reference(prog, inputs, batched.ir.name)
        for comp in (batched, naive):
            got = exec_circuit(comp.circuit, inputs, cfg=pc.cfg).outputs
            correct = correct and np.array_equal(np.asarray(got), np.asarray(expected))
    nc, bc = naive.report.counts, batched.report.counts
    ratios = {k: _ratio(nc[k], bc[k]) for k in (ROTATE, CT_MUL, PT_MUL)}
    ratios["total"] = _ratio(naive.report.total_ops, batched.report.total_ops)
    return BenchResult(entry.name, n, naive.report, batched.report, ratios, correct,
                       {"naive": n_ms, "batched": b_ms}, trials)


COLUMNS = ("benchmark", "n", "naive ops", "batched ops", "ratio", "rot", "ct-mul", "pt-mul", "depth",
           "params", "compile ms", "verdict")


def format_table(rows: list[BenchResult]) -> str:
    """Aligned text table, one line per benchmark row."""
    body = []
    for r in rows:
        b = r.batched
        body.append((
            r.name, str(r.n), str(r.naive.total_ops), str(b.total_ops),
            "-" if r.ratios["total"] is None else f"{r.ratios['total']:.1f}",
            str(b.counts[ROTATE]), str(b.counts[CT_MUL]), str(b.counts[PT_MUL]), f"{b.depth:g}",
            b.params.name if b.params else "none", f"{r.compile_ms['batched']:.0f}", r.verdict,
        ))
    widths = [max(len(h), *(len(row[k]) for row in body)) if body else len(h) for k, h in enumerate(COLUMNS)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(COLUMNS, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(row, widths))))
    return "\n".join(lines)
