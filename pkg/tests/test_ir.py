from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings

from batchfhe.corpus import CORPUS
from batchfhe.errors import IrParseError, PipelineError
from batchfhe.frontend import compile_source
from batchfhe.ir.core import dce
from batchfhe.ir.passes import canonicalize, constant_fold, cse
from batchfhe.ir.text import export_json, import_json, parse_ir, print_ir
from batchfhe.ir.verify import STAGE_DIALECTS, check, verify
from batchfhe.sim.interp import run_ir

from irgen import hl_functions, random_ir_inputs


def ir(body: str, header: str = "func @f(%0 x: bint<8> vector, %1 y: bint<8> vector) -> vector [n=8, t=65537] {"):
    return parse_ir(header + "\n" + body + "\n}\n")


def corpus_functions():
    for name, e in sorted(CORPUS.items()):
        yield name, compile_source(e.source(), {"N": 16} if e.image else None)[1]


class TestVerify:
    def test_use_before_def(self):
        f = ir("  %2 = bsf.add(%0, %3) : bint<8>\n  %3 = bsf.add(%0, %1) : bint<8>\n  return %2")
        assert any("use before def" in e for e in verify(f))

    def test_unnormalized_rotation(self):
        f = ir("  %2 = bsf.rotate(%0) {offset=8} : bint<8>\n  return %2")
        assert any("unnormalized rotation" in e for e in verify(f))

    def test_slot_out_of_range(self):
        f = ir("  %2 = hl.extract(%0) {slot=9} : sint\n  return %2",
               "func @f(%0 x: tensor<8> vector) -> scalar [n=8, t=65537] {")
        assert any("out of range" in e for e in verify(f))

    def test_stage_whitelist(self):
        f = ir("  %2 = hl.extract(%0) {slot=1} : sint\n  return %2",
               "func @f(%0 x: bint<8> vector) -> scalar [n=8, t=65537] {")
        assert verify(f, STAGE_DIALECTS["mixed"]) == []
        assert any("not allowed" in e for e in verify(f, STAGE_DIALECTS["bsf"]))
        with pytest.raises(PipelineError):
            check(f, STAGE_DIALECTS["bsf"])

    @pytest.mark.parametrize("name,f", list(corpus_functions()))
    def test_corpus_lowering_is_clean(self, name, f):
        assert verify(f, STAGE_DIALECTS["hl"]) == []


class TestText:
    @pytest.mark.parametrize("name,f", list(corpus_functions()))
    def test_round_trip(self, name, f):
        assert parse_ir(print_ir(f)).structurally_equal(f)
        assert import_json(json.dumps(export_json(f))).structurally_equal(f)

    def test_empty_function(self):
        f = ir("  return %0")
        text = print_ir(f)
        assert text.splitlines() == [
            "func @f(%0 x: bint<8> vector, %1 y: bint<8> vector) -> vector [n=8, t=65537] {", "  return %0", "}"]

    def test_duplicate_value_id(self):
        with pytest.raises(IrParseError) as e:
            ir("  %2 = bsf.add(%0, %1) : bint<8>\n  %2 = bsf.add(%0, %0) : bint<8>\n  return %2")
        assert e.value.line == 3

    def test_malformed_line(self):
        with pytest.raises(IrParseError):
            ir("  %2 = bsf.add(%0, %1) bint<8>\n  return %2")

    def test_json_schema(self):
        doc = export_json(ir("  %2 = bsf.rotate(%0) {offset=3} : bint<8>\n  return %2"))
        assert set(doc) >= {"name", "params", "ops", "ret"}
        assert doc["ops"][0] == {"id": 2, "kind": "bsf.rotate", "operands": [0], "attrs": {"offset": 3},
                                 "type": "bint<8>"}

    def test_printing_is_deterministic(self):
        src = CORPUS["roberts-cross"].source()
        a = print_ir(compile_source(src, {"N": 16})[1])
        b = print_ir(compile_source(src, {"N": 16})[1])
        assert a == b


class TestGenericPasses:
    def test_fold_constants(self):
        f = ir("  %2 = hl.const() {value=2} : pint\n  %3 = hl.const() {value=3} : pint\n"
               "  %4 = hl.add(%2, %3) : pint\n  return %4", "func @f() -> scalar [n=8, t=65537] {")
        g = dce(constant_fold(f))
        (op,) = g.ops
        assert op.name == "hl.const" and op.attr("value") == 5

    def test_fold_identities(self):
        f = ir("  %2 = bsf.rotate(%0) {offset=0} : bint<8>\n  %3 = bsf.splat() {value=1} : pvec<8>\n"
               "  %4 = bsf.mul(%2, %3) : bint<8>\n  %5 = bsf.splat() {value=0} : pvec<8>\n"
               "  %6 = bsf.add(%4, %5) : bint<8>\n  return %6")
        g = dce(constant_fold(f))
        assert g.ops == () and g.ret == 0

    def test_mul_by_zero(self):
        f = ir("  %2 = bsf.splat() {value=0} : pvec<8>\n  %3 = bsf.mul(%0, %2) : bint<8>\n"
               "  %4 = bsf.add(%1, %3) : bint<8>\n  return %4")
        g = constant_fold(f)
        assert g.ret == 1

    def test_canonical_operand_order(self):
        f = ir("  %2 = bsf.add(%1, %0) : bint<8>\n  return %2")
        assert canonicalize(f).ops[0].operands == (0, 1)

    def test_constants_sort_last(self):
        f = ir("  %2 = bsf.splat() {value=4} : pvec<8>\n  %3 = bsf.mul(%2, %1) : bint<8>\n  return %3")
        g = canonicalize(f)
        mul = g.defs[g.ret]
        assert g.defs[mul.operands[-1]].name == "bsf.splat"

    def test_rotation_composition(self):
        f = parse_ir("func @f(%0 v: bint<16> vector) -> vector [n=16, t=65537] {\n"
                     "  %1 = bsf.rotate(%0) {offset=3} : bint<16>\n  %2 = bsf.rotate(%1) {offset=5} : bint<16>\n"
                     "  return %2\n}\n")
        (op,) = canonicalize(f).ops
        assert op.name == "bsf.rotate" and op.attr("offset") == 8 and op.operands == (0,)

    def test_sub_const_to_add(self):
        f = ir("  %2 = bsf.splat() {value=5} : pvec<8>\n  %3 = bsf.sub(%0, %2) : bint<8>\n  return %3")
        g = canonicalize(f)
        op = g.defs[g.ret]
        assert op.name == "bsf.add"
        assert g.defs[op.operands[1]].attr("value") == 65537 - 5

    def test_dead_extract_removed(self):
        f = ir("  %2 = hl.extract(%0) {slot=1} : sint\n  return %1",
               "func @f(%0 x: tensor<8> vector, %1 y: tensor<8> vector) -> vector [n=8, t=65537] {")
        assert canonicalize(f).ops == ()
        assert dce(f).ops == ()

    def test_cse_merges_identical(self):
        f = ir("  %2 = bsf.add(%0, %1) : bint<8>\n  %3 = bsf.add(%0, %1) : bint<8>\n"
               "  %4 = bsf.mul(%2, %3) : bint<8>\n  return %4")
        g = cse(f)
        assert g.count("bsf.add") == 1
        mul = g.defs[g.ret]
        assert mul.operands[0] == mul.operands[1]

    def test_cse_respects_operand_order(self):
        f = ir("  %2 = bsf.add(%0, %1) : bint<8>\n  %3 = bsf.add(%1, %0) : bint<8>\n"
               "  %4 = bsf.mul(%2, %3) : bint<8>\n  return %4")
        assert cse(f).count("bsf.add") == 2
        assert cse(canonicalize(f)).count("bsf.add") == 1

    def test_cse_distinguishes_attributes(self):
        f = ir("  %2 = bsf.rotate(%0) {offset=1} : bint<8>\n  %3 = bsf.rotate(%0) {offset=2} : bint<8>\n"
               "  %4 = bsf.add(%2, %3) : bint<8>\n  return %4")
        assert cse(f).count("bsf.rotate") == 2


GENERIC = {"constant_fold": constant_fold, "canonicalize": canonicalize, "cse": cse}


@pytest.mark.parametrize("pname", sorted(GENERIC))
@settings(max_examples=60)
@given(f=hl_functions())
def test_generic_pass_properties(pname, f):
    p = GENERIC[pname]
    assert verify(f) == []
    g = p(f)
    assert verify(g) == []
    assert p(g).structurally_equal(g)  # idempotent
    x = random_ir_inputs(f, 20, np.random.default_rng(0))
    assert np.array_equal(run_ir(f, x), run_ir(g, x))


@given(f=hl_functions())
@settings(max_examples=40)
def test_random_ir_text_round_trip(f):
    assert parse_ir(print_ir(f)).structurally_equal(f)
