"""Compiled vs numpy tape kernel on corpus circuits.

    python benchmarks/bench_kernels.py [--n 4096] [--trials 100] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from batchfhe.corpus import CORPUS
from batchfhe.pipeline import PipelineConfig, compile_naive, compile_source
from batchfhe.sim import _kernels_py
from batchfhe.sim.tape import build_tape

try:
    from batchfhe.sim import _kernels
except ImportError:
    _kernels = None


def _time(fn, mem0, tape, t, repeat):
    best = float("inf")
    for _ in range(repeat):
        mem = mem0.copy()
        t0 = time.perf_counter()
        fn(mem, tape.consts, tape.code, t)
        best = min(best, time.perf_counter() - t0)
    return best, mem


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--names", default="roberts-cross,box-blur,hamming-distance,linear-polynomial")
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    print(f"{'benchmark':<20}{'pipeline':<10}{'ops':>7}{'rows':>7}{'slots':>7}"
          f"{'numpy ms':>11}{'cython ms':>11}{'speedup':>9}")
    for name in args.names.split(","):
        entry = CORPUS[name]
        pc = PipelineConfig(defines=entry.defines(args.n))
        src = entry.source()
        for label, comp in (("batched", compile_source(src, pc)), ("naive", compile_naive(src, pc))):
            c = comp.circuit
            tape = build_tape(c)
            mem0 = rng.integers(0, c.modulus, size=(tape.rows, args.trials, c.slots), dtype=np.int64)
            tp, mp = _time(_kernels_py.run_tape, mem0, tape, c.modulus, args.repeat)
            tc, mc = _time(_kernels.run_tape, mem0, tape, c.modulus, args.repeat)
            assert np.array_equal(mp, mc), "kernels disagree"
            print(f"{name:<20}{label:<10}{len(tape.code):>7}{tape.rows:>7}{c.slots:>7}"
                  f"{tp * 1e3:>11.2f}{tc * 1e3:>11.2f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
