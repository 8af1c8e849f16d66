from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings

from batchfhe.backend.circuit import lower_to_circuit
from batchfhe.compare import compare_compiled
from batchfhe.corpus import CORPUS
from batchfhe.errors import PipelineError
from batchfhe.pipeline import DEFAULT_ORDER, PASSES, PipelineConfig, check_order, compile_source, run_passes
from batchfhe.sim.interp import run_ir
from batchfhe.sim.simulator import exec_circuit

from conftest import small_config
from irgen import hl_functions, random_ir_inputs


class TestOrder:
    def test_default_ok(self):
        check_order(DEFAULT_ORDER)

    @pytest.mark.parametrize("order,msg", [
        (("simdify", "merge-arith", "materialize"), "merge-arith must run before simdify"),
        (("simdify", "vectorize-plain", "materialize"), "vectorize-plain must run before simdify"),
        (("lower-folds", "cleanup", "materialize"), "after the first cleanup"),
        (("cleanup",), "materialize must be the last"),
        (("materialize", "materialize"), "exactly once"),
        (("bogus", "materialize"), "unknown pass"),
    ])
    def test_bad_orders(self, order, msg):
        with pytest.raises(PipelineError, match=msg):
            check_order(order)

    def test_cannot_skip_materialize(self):
        with pytest.raises(PipelineError):
            PipelineConfig(skip=frozenset({"materialize"}))

    def test_unknown_skip(self):
        with pytest.raises(PipelineError):
            PipelineConfig(skip=frozenset({"nope"}))


SKIPPABLE = sorted(set(PASSES) - {"materialize"})


@pytest.mark.parametrize("skip", [None] + SKIPPABLE)
@pytest.mark.parametrize("name", list(CORPUS))
def test_skip_pass_equivalence(name, skip):
    pc = small_config(name, skip=frozenset({skip} if skip else ()))
    res = compare_compiled(compile_source(CORPUS[name].source(), pc), pc, trials=30, seed=7)
    assert res.passed, res.divergence


def test_verify_each_runs():
    comp = compile_source(CORPUS["box-blur"].source(), small_config("box-blur"), verify_each=True)
    assert comp.circuit.count("rotate") > 0


def test_timings_recorded():
    comp = compile_source(CORPUS["dot-product"].source())
    assert {"frontend", "lower", "normalize", "simdify", "materialize", "circuit"} <= set(comp.timings)


@settings(max_examples=60)
@given(hl_functions())
def test_random_ir_end_to_end(f):
    """Passes and lowering preserve the meaning of arbitrary high-level IR."""
    g = run_passes(f, PipelineConfig(), {})
    x = random_ir_inputs(f, 6, np.random.default_rng(0))
    want = run_ir(f, x)
    try:
        c = lower_to_circuit(g)
    except PipelineError:
        return  # result independent of any secret; nothing to encrypt
    assert np.array_equal(exec_circuit(c, x).outputs, want)
