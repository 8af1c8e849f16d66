"""Simulator laws, checked by generating inputs and comparing with direct numpy.

``EXAMPLES`` counts the cases each property has run, for the acceptance suite.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

import numpy as np
from hypothesis import given, settings, strategies as st

from batchfhe.backend.analysis import SchemeParams
from batchfhe.backend.circuit import (CT_ADD, CT_MUL, CT_SUB, NEGATE, PT_ADD, PT_MUL, RELIN, ROTATE,
                                      CircuitFunction, CircuitInput, CircuitOp, lower_to_circuit)
from batchfhe.ir.core import SINT_T, IrFunction, IrOp, Param, bint_t
from batchfhe.pipeline import compile_source
from batchfhe.sim.simulator import SimCiphertext, apply_op, encrypt_sim, exec_circuit
from batchfhe.simd.materialize import materialize_virtuals

from conftest import vec_program

T = 65537
EXAMPLES: Counter = Counter()
SMALL_SIZES = st.sampled_from([4, 8, 16])
SIZES = st.sampled_from([2, 4, 8, 16, 32, 64])


def params(n: int) -> SchemeParams:
    return SchemeParams("XLARGE", n, T, 460)


@st.composite
def vectors(draw, sizes=SMALL_SIZES, count=1):
    n = draw(sizes)
    vs = [np.array(draw(st.lists(st.integers(0, T - 1), min_size=n, max_size=n)), dtype=np.int64)
          for _ in range(count)]
    return n, vs


def rot(v, k):
    return np.array([v[(j + k) % len(v)] for j in range(len(v))])


def rotate_ct(ct: SimCiphertext, k: int) -> SimCiphertext:
    return apply_op(ROTATE, [ct], T, rotation=k % len(ct.slots)) if k % len(ct.slots) else ct


@settings(max_examples=200)
@given(vectors(), st.integers(-70, 70), st.integers(-70, 70))
def test_rotation_group_laws(nv, a, b):
    n, (v,) = nv
    ct = encrypt_sim(v, params(n))
    # composition adds amounts, n is the identity, and -k undoes k
    assert np.array_equal(rotate_ct(rotate_ct(ct, a), b).slots, rotate_ct(ct, a + b).slots)
    assert np.array_equal(rotate_ct(ct, a).slots, rot(v, a))
    assert np.array_equal(rotate_ct(ct, n * a).slots, v)
    assert np.array_equal(rotate_ct(rotate_ct(ct, a), -a).slots, v)
    # the circuit route agrees with the single-ciphertext route
    k1, k2 = a % n, b % n
    ops, last = [], 0
    for i, k in enumerate([k1, k2]):
        if k:
            ops.append(CircuitOp(10 + i, ROTATE, (last,), rotation=k))
            last = 10 + i
    c = CircuitFunction("r", n, T, [CircuitInput(0, "v", "ct", "vector")], ops, [last], "vector")
    assert exec_circuit(c, {"v": v}, params(n)).outputs.tolist() == rot(v, a + b).tolist()
    EXAMPLES["rotation"] += 1


@settings(max_examples=200)
@given(vectors(count=2), st.lists(st.tuples(st.integers(0, 1), st.integers(0, 63), st.integers(0, 63)),
                                  min_size=1, max_size=12))
def test_mask_insert_equivalence(nv, writes):
    n, (v0, v1) = nv
    ps = (Param(0, "a", bint_t(n), "vector"), Param(1, "b", bint_t(n), "vector"))
    ops, cur, nid = [], 0, 2
    expect = v0.copy()
    for src, j, s in writes:
        j, s = j % n, s % n
        ops.append(IrOp(nid, "hl.extract", (src,), (("slot", j),), SINT_T))
        ops.append(IrOp(nid + 1, "hl.insert", (nid, cur), (("slot", s),), bint_t(n)))
        cur, nid = nid + 1, nid + 2
        expect[s] = (v0, v1)[src][j]
    f = IrFunction("m", ps, tuple(ops), cur, "vector", n, T)
    c = lower_to_circuit(materialize_virtuals(f))
    out = exec_circuit(c, {"a": v0, "b": v1}, params(n)).outputs
    assert out.tolist() == expect.tolist()
    EXAMPLES["mask-insert"] += 1


@st.composite
def random_circuits(draw):
    n = draw(SMALL_SIZES)
    inputs = [CircuitInput(0, "a", "ct", "vector"), CircuitInput(1, "b", "ct", "vector"),
              CircuitInput(2, "p", "pt", "vector")]
    cts, ops, nid = [0, 1], [], 3
    for _ in range(draw(st.integers(1, 15))):
        kind = draw(st.sampled_from([CT_ADD, CT_SUB, CT_MUL, PT_ADD, PT_MUL, ROTATE, RELIN, NEGATE]))
        x = draw(st.sampled_from(cts))
        if kind in (CT_ADD, CT_SUB, CT_MUL):
            operands = (x, draw(st.sampled_from(cts)))
        elif kind in (PT_ADD, PT_MUL):
            operands = (x, 2)
        else:
            operands = (x,)
        k = draw(st.integers(1, n - 1)) if kind == ROTATE else None
        ops.append(CircuitOp(nid, kind, operands, rotation=k))
        cts.append(nid)
        nid += 1
    return CircuitFunction("r", n, T, inputs, ops, [nid - 1], "vector")


@settings(max_examples=200)
@given(random_circuits(), st.integers(0, 2 ** 31))
def test_noise_monotone(c, seed):
    rng = np.random.default_rng(seed)
    ins = {k: rng.integers(0, T, size=c.slots) for k in ("a", "b", "p")}
    tr = exec_circuit(c, ins, params(c.slots), trace=True)
    for op in c.ops:
        for v in op.operands:
            if c.kinds[v] == "ct":
                assert tr.noise[op.id] >= tr.noise[v]
    assert tr.peak_noise == max(tr.noise.values())
    assert tr.decrypt_ok == (tr.peak_noise <= tr.budget)
    # the single-ciphertext route tracks the same noise and values
    env = {0: encrypt_sim(ins["a"], params(c.slots)), 1: encrypt_sim(ins["b"], params(c.slots)), 2: ins["p"]}
    for op in c.ops:
        env[op.id] = apply_op(op.kind, [env[v] for v in op.operands], T, op.rotation or 0)
        assert env[op.id].noise == tr.noise[op.id]
        assert np.array_equal(env[op.id].slots, tr.values[op.id])
    EXAMPLES["noise"] += 1


@st.composite
def progressions(draw):
    n = draw(SIZES)
    stride = draw(st.sampled_from([d for d in (1, 2, 4, 8, 16, 32, 64) if d <= n]))
    m = draw(st.sampled_from([m for m in (1, 2, 4, 8, 16, 32, 64) if 2 <= m * stride <= n] or [1]))
    start = draw(st.integers(0, n - 1))
    return n, tuple((start + k * stride) % n for k in range(m))


@lru_cache(maxsize=None)
def fold_circuit(n: int, slots: tuple[int, ...], op: str):
    body = f"return {f' {op} '.join(f'x[{s}]' for s in slots)};"
    return compile_source(vec_program(body, n, ret="secret int")).circuit


@settings(max_examples=250)
@given(progressions(), st.sampled_from(["+", "*"]), st.integers(0, 2 ** 31))
def test_rotate_and_reduce(prog, op, seed):
    n, slots = prog
    x = np.random.default_rng(seed).integers(0, T, size=(4, n))
    c = fold_circuit(n, slots, op)
    picked = x[:, list(slots)]
    if op == "+":
        brute = picked.sum(axis=1) % T
    else:
        brute = np.ones(4, dtype=np.int64)
        for col in picked.T:
            brute = brute * col % T
    assert exec_circuit(c, {"x": x, "y": x}).outputs.tolist() == brute.tolist()
    if len(slots) == n and n > 1:
        assert c.count(ROTATE) == n.bit_length() - 1
    # rotate-and-reduce by halving leaves the total in every slot
    ct = encrypt_sim(x[0], params(n))
    k = n // 2
    while k:
        ct = apply_op(CT_ADD, [ct, rotate_ct(ct, k)], T)
        k //= 2
    assert ct.slots.tolist() == [int(x[0].sum() % T)] * n
    EXAMPLES["rotate-and-reduce"] += 1


@settings(max_examples=200)
@given(vectors(count=3), st.integers(0, 63))
def test_simd_distributivity(nv, k):
    n, (a, b, p) = nv
    P = params(n)
    ca, cb = encrypt_sim(a, P), encrypt_sim(b, P)
    for kind in (CT_ADD, CT_SUB, CT_MUL):
        lhs = rotate_ct(apply_op(kind, [ca, cb], T), k)
        rhs = apply_op(kind, [rotate_ct(ca, k), rotate_ct(cb, k)], T)
        assert np.array_equal(lhs.slots, rhs.slots)
    lhs = apply_op(PT_MUL, [apply_op(CT_ADD, [ca, cb], T), p], T)
    rhs = apply_op(CT_ADD, [apply_op(PT_MUL, [ca, p], T), apply_op(PT_MUL, [cb, p], T)], T)
    assert np.array_equal(lhs.slots, rhs.slots)
    assert np.array_equal(apply_op(CT_MUL, [ca, cb], T).slots, a * b % T)
    EXAMPLES["distributivity"] += 1
