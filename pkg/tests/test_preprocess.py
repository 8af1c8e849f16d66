from __future__ import annotations

from collections import Counter

import numpy as np
from hypothesis import given, settings

from batchfhe.backend.circuit import PT_CONST, PT_MUL, ROTATE, CT_ADD
from batchfhe.frontend import compile_source
from batchfhe.ir.passes import canonicalize, constant_fold
from batchfhe.ir.text import parse_ir
from batchfhe.ir.verify import verify
from batchfhe.pipeline import compile_source as compile_full
from batchfhe.preprocess import merge_arith, vectorize_plaintexts
from batchfhe.sim.interp import run_ir

from conftest import vec_program
from irgen import hl_functions, random_ir_inputs

HEADER = "func @f(%0 a: sint scalar, %1 b: sint scalar, %2 c: sint scalar) -> scalar [n=4, t=65537] {\n"


def normalized(src, **defines):
    _, f = compile_source(src, defines or None)
    return canonicalize(constant_fold(f))


class TestMergeArith:
    def test_chain(self):
        f = parse_ir(HEADER + "  %3 = hl.add(%0, %1) : sint\n  %4 = hl.add(%3, %2) : sint\n  return %4\n}\n")
        g = merge_arith(f)
        (op,) = g.ops
        assert op.name == "hl.add" and sorted(op.operands) == [0, 1, 2]

    def test_multi_use_not_merged(self):
        f = parse_ir(HEADER + "  %3 = hl.add(%0, %1) : sint\n  %4 = hl.add(%3, %2) : sint\n"
                     "  %5 = hl.mul(%3, %4) : sint\n  return %5\n}\n")
        g = merge_arith(f)
        assert g.count("hl.add") == 2

    def test_square_not_merged(self):
        f = parse_ir(HEADER + "  %3 = hl.mul(%0, %1) : sint\n  %4 = hl.mul(%3, %3) : sint\n  return %4\n}\n")
        assert merge_arith(f).count("hl.mul") == 2

    def test_sum_loop(self):
        src = vec_program("secret int s = 0;\nfor i in 0..N: { s = s + x[i]; }\nreturn s;", 8, ret="secret int")
        g = merge_arith(normalized(src))
        (add,) = [op for op in g.ops if op.name == "hl.add"]
        assert sum(1 for v in add.operands if g.defs[v].name == "hl.extract") == 8

    def test_sub_of_constant_joins_chain(self):
        f = parse_ir(HEADER + "  %3 = hl.const() {value=4} : pint\n  %4 = hl.sub(%0, %3) : sint\n"
                     "  %5 = hl.add(%4, %1) : sint\n  return %5\n}\n")
        g = merge_arith(f)
        assert g.count("hl.add") == 1 and g.count("hl.sub") == 0


@settings(max_examples=80)
@given(f=hl_functions())
def test_merge_fixpoint_and_semantics(f):
    g = merge_arith(f)
    assert verify(g) == []
    users = g.users
    for op in g.ops:
        us = users.get(op.result, [])
        if op.result != g.ret and len(us) == 1 and us[0].name == op.name and op.name in ("hl.add", "hl.mul"):
            assert us[0].operands.count(op.result) > 1
    x = random_ir_inputs(f, 16, np.random.default_rng(3))
    assert np.array_equal(run_ir(f, x), run_ir(g, x))


@settings(max_examples=80)
@given(f=hl_functions())
def test_vectorize_plaintexts_semantics(f):
    g = vectorize_plaintexts(merge_arith(f))
    assert verify(g) == []
    x = random_ir_inputs(f, 16, np.random.default_rng(4))
    assert np.array_equal(run_ir(f, x), run_ir(g, x))


class TestVectorizePlaintexts:
    SRC = ("secret int[4] f(secret int[4] x) {\n secret int[4] z = x;\n"
           " z[0] = x[0] + 5;\n z[1] = x[1] + 7;\n return z;\n}")

    def test_two_members(self):
        g = vectorize_plaintexts(merge_arith(normalized(self.SRC)))
        (p,) = [op for op in g.ops if op.name == "bsf.vconst"]
        assert p.attr("values") == (5, 7, 0, 0)
        uses = [op for op in g.ops if op.name == "hl.extract" and op.operands == (p.result,)]
        assert sorted(op.attr("slot") for op in uses) == [0, 1]

    def test_mul_fill_is_one(self):
        src = self.SRC.replace("+ 5", "* 5").replace("+ 7", "* 7")
        g = vectorize_plaintexts(merge_arith(normalized(src)))
        (p,) = [op for op in g.ops if op.name == "bsf.vconst"]
        assert p.attr("values") == (5, 7, 1, 1)

    def test_isolated_op_unchanged(self):
        src = "secret int[4] f(secret int[4] x) {\n secret int[4] z = x;\n z[2] = x[2] + 9;\n return z;\n}"
        f = merge_arith(normalized(src))
        assert vectorize_plaintexts(f).structurally_equal(f)

    def test_matrix_vector_diagonals(self):
        m = np.arange(2, 18).reshape(4, 4)
        lit = ", ".join(str(v) for v in m.ravel())
        src = ("const N = 4;\nsecret int[N] mv(secret int[N] x) {\n"
               f"  int[16] M = {{{lit}}};\n  secret int[N] y;\n"
               "  for i in 0..N: {\n    secret int acc = 0;\n"
               "    for j in 0..N: { acc += M[i * N + j] * x[j]; }\n    y[i] = acc;\n  }\n  return y;\n}")
        c = compile_full(src).circuit
        # hand-written diagonal method: y = sum_d rot(x * roll(diag_d, d), d), diag_d[i] = M[i][(i+d) % 4]
        diags = {tuple(np.roll([m[i, (i + d) % 4] for i in range(4)], d).tolist()) for d in range(4)}
        consts = {op.values for op in c.ops if op.kind == PT_CONST}
        assert consts == diags
        counts = c.counts()
        assert (counts[PT_MUL], counts[ROTATE], counts[CT_ADD]) == (4, 3, 3)
