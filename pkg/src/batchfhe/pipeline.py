"""Pass pipeline: source -> high-level IR -> batched IR -> circuit -> cost report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .backend.analysis import CostReport, SchemeParams, estimate_cost, params_by_name
from .backend.circuit import CircuitFunction, insert_relinearization, lower_naive, lower_to_circuit
from .config import Config, default_config
from .errors import PipelineError
from .frontend import check_types, lower_function, parse, tokenize
from .frontend.typecheck import TypedProgram
from .ir.core import IrFunction
from .ir.passes import canonicalize, constant_fold
from .ir.verify import STAGE_DIALECTS, check
from .preprocess import merge_arith, vectorize_plaintexts
from .simd.cleanup import cleanup
from .simd.folds import lower_folds
from .simd.materialize import materialize_virtuals
from .simd.simdify import simdify

PASSES: dict[str, Callable[[IrFunction], IrFunction]] = {
    "merge-arith": merge_arith,
    "vectorize-plain": vectorize_plaintexts,
    "simdify": simdify,
    "cleanup": cleanup,
    "lower-folds": lower_folds,
    "materialize": materialize_virtuals,
}

DEFAULT_ORDER = ("merge-arith", "vectorize-plain", "simdify", "cleanup", "lower-folds", "cleanup", "materialize")
MANDATORY = frozenset({"materialize"})
EMITS = ("ast", "ir", "batched", "circuit", "stats")


def check_order(passes: tuple[str, ...]) -> None:
    """Reject unknown passes and orders that break the required partial order."""
    for p in passes:
        if p not in PASSES:
            raise PipelineError(f"unknown pass {p!r}; known: {', '.join(PASSES)}")
    if not passes or passes[-1] != "materialize":
        raise PipelineError("materialize must be the last pass")
    if passes.count("materialize") != 1:
        raise PipelineError("materialize must run exactly once")
    idx = {p: [i for i, q in enumerate(passes) if q == p] for p in set(passes)}

    def before(a: str, b: str) -> None:
        if a in idx and b in idx and max(idx[a]) > min(idx[b]):
            raise PipelineError(f"{a} must run before {b}")

    before("merge-arith", "simdify")
    before("vectorize-plain", "simdify")
    before_first = "lower-folds" in idx and "cleanup" in idx and min(idx["lower-folds"]) < min(idx["cleanup"])
    if before_first:
        raise PipelineError("lower-folds must run after the first cleanup")


@dataclass
class PipelineConfig:
    passes: tuple[str, ...] = DEFAULT_ORDER
    skip: frozenset[str] = frozenset()
    relin: str = "always"
    params: Optional[str] = None  # override of the parameter row by name
    modulus: Optional[int] = None  # plaintext modulus; None takes the config file's
    emit: str = "stats"
    seed: int = 0
    defines: dict[str, int] = field(default_factory=dict)
    config: Optional[Config] = None

    def __post_init__(self):
        bad = set(self.skip) - set(PASSES)
        if bad:
            raise PipelineError(f"unknown pass(es) to skip: {', '.join(sorted(bad))}")
        if self.skip & MANDATORY:
            raise PipelineError("materialize cannot be skipped")
        if self.relin not in ("always", "none"):
            raise PipelineError(f"unknown relinearization policy {self.relin!r}")
        if self.emit not in EMITS:
            raise PipelineError(f"unknown emit stage {self.emit!r}; choose from {', '.join(EMITS)}")
        check_order(tuple(self.passes))

    @property
    def cfg(self) -> Config:
        return self.config or default_config()

    @property
    def t(self) -> int:
        return self.modulus if self.modulus is not None else self.cfg.plaintext_modulus

    def active(self) -> list[str]:
        return [p for p in self.passes if p not in self.skip]


@dataclass
class Compiled:
    program: TypedProgram
    ir: IrFunction  # freshly lowered
    batched: IrFunction
    circuit: CircuitFunction
    report: CostReport
    timings: dict[str, float]


def front_end(source: str, pc: PipelineConfig, name: Optional[str] = None) -> tuple[TypedProgram, IrFunction, dict]:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    prog = check_types(parse(tokenize(source)), pc.defines or None, pc.t)
    t1 = time.perf_counter()
    f = lower_function(prog, name)
    t2 = time.perf_counter()
    timings["frontend"] = (t1 - t0) * 1e3
    timings["lower"] = (t2 - t1) * 1e3
    check(f, STAGE_DIALECTS["hl"], "lowering")
    return prog, f, timings


def run_passes(f: IrFunction, pc: PipelineConfig, timings: dict[str, float],
               verify_each: bool = False) -> IrFunction:
    """Run the active passes; the result is always verified, intermediate stages on request."""
    t0 = time.perf_counter()
    f = canonicalize(constant_fold(f))
    timings["normalize"] = (time.perf_counter() - t0) * 1e3
    done_materialize = False
    for p in pc.active():
        t0 = time.perf_counter()
        f = PASSES[p](f)
        timings[p] = timings.get(p, 0.0) + (time.perf_counter() - t0) * 1e3
        done_materialize = done_materialize or p == "materialize"
        if verify_each:
            check(f, STAGE_DIALECTS["bsf" if done_materialize else "mixed"], p)
    if not verify_each:
        check(f, STAGE_DIALECTS["bsf"], "the pipeline")
    return f


def back_end(f: IrFunction, pc: PipelineConfig, timings: dict[str, float],
             naive: bool = False) -> tuple[CircuitFunction, CostReport]:
    t0 = time.perf_counter()
    c = lower_naive(f) if naive else lower_to_circuit(f)
    c = insert_relinearization(c, pc.relin)
    timings["circuit"] = (time.perf_counter() - t0) * 1e3
    params: Optional[SchemeParams] = None
    if pc.params:
        params = params_by_name(pc.params, c.slots, pc.cfg)
    rep = estimate_cost(c, pc.cfg, params)
    rep.compile_ms = dict(timings)
    return c, rep


def compile_source(source: str, pc: Optional[PipelineConfig] = None, name: Optional[str] = None,
                   verify_each: bool = False) -> Compiled:
    """Run the whole batched pipeline."""
    pc = pc or PipelineConfig()
    prog, f, timings = front_end(source, pc, name)
    g = run_passes(f, pc, timings, verify_each)
    c, rep = back_end(g, pc, timings)
    return Compiled(prog, f, g, c, rep, timings)


def compile_naive(source: str, pc: Optional[PipelineConfig] = None, name: Optional[str] = None) -> Compiled:
    """Textbook baseline: constant folding only, then one ciphertext per element."""
    pc = pc or PipelineConfig()
    prog, f, timings = front_end(source, pc, name)
    t0 = time.perf_counter()
    g = canonicalize(constant_fold(f))
    timings["normalize"] = (time.perf_counter() - t0) * 1e3
    c, rep = back_end(g, pc, timings, naive=True)
    return Compiled(prog, f, g, c, rep, timings)
