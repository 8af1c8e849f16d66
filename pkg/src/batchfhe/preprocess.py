"""Preparatory rewrites on high-level IR: n-ary merging and plaintext packing."""

from __future__ import annotations

from collections import defaultdict

from .ir.core import PINT_T, IrFunction, IrOp, Rewriter, dce, pvec_t
from .ir.passes import canonicalize
from .simd.slots import slot_demands

MERGEABLE = frozenset({"hl.add", "hl.mul", "bsf.add", "bsf.mul"})


def merge_arith(f: IrFunction) -> IrFunction:
    """Fold chains of single-use adds (muls) into one n-ary add (mul).

    Subtractions of constants are first turned into additions by
    canonicalization so they can join a chain.
    """
    f = canonicalize(f)
    defs = f.defs
    uses = f.use_counts
    users = f.users
    absorbed = set()
    for op in f.ops:
        if op.name in MERGEABLE and uses.get(op.result) == 1 and op.result != f.ret:
            (u,) = users[op.result]
            # mul(m, m) uses m twice; merging it would duplicate m's whole tree
            if u.name == op.name and u.operands.count(op.result) == 1:
                absorbed.add(op.result)

    def leaves(op: IrOp) -> list[int]:
        out: list[int] = []
        stack = list(reversed(op.operands))
        while stack:
            v = stack.pop()
            if v in absorbed:
                stack.extend(reversed(defs[v].operands))
            else:
                out.append(v)
        return out

    ops = []
    for op in f.ops:
        if op.result in absorbed:
            continue
        if op.name in MERGEABLE and any(v in absorbed for v in op.operands):
            op = IrOp(op.result, op.name, tuple(leaves(op)), op.attrs, op.type)
        ops.append(op)
    return canonicalize(f.replace(ops=ops))


def _member(f: IrFunction, op: IrOp):
    """(const operand position, const value, source vector, source slot) or None."""
    if op.name not in ("hl.add", "hl.mul"):
        return None
    defs = f.defs
    const_pos = [k for k, v in enumerate(op.operands) if v in defs and defs[v].name == "hl.const"]
    if len(const_pos) != 1:
        return None
    for v in op.operands:
        d = defs.get(v)
        if d is not None and d.name == "hl.extract":
            return const_pos[0], defs[op.operands[const_pos[0]]].attr("value"), d.operands[0], d.attr("slot")
    return None


def vectorize_plaintexts(f: IrFunction) -> IrFunction:
    """Pack the scalar constants of parallel ct-pt ops into plaintext vectors.

    Ops are grouped by (kind, source vector, destination chain, offset from
    source slot to destination slot).  Within a group each constant moves to
    its member's source slot of a fresh plaintext vector, so that after
    SIMD translation all members rotate both operands by the same amount and
    collapse to one op.  Unused slots hold the op's identity.
    """
    n, t = f.slots, f.modulus
    demands = slot_demands(f)
    groups: dict[tuple, list] = defaultdict(list)
    for op in f.ops:
        m = _member(f, op)
        if m is None:
            continue
        pos, value, src, slot = m
        d = demands.get(op.result)
        key = (op.name, src, d.root if d else None, (d.slot - slot) % n if d else 0)
        groups[key].append((op.result, pos, value, slot))

    plan: dict[int, tuple[int, int, int]] = {}  # op -> (group index, const position, slot)
    vectors: list[tuple[int, ...]] = []
    for key, members in groups.items():
        # members disagreeing on a slot go to separate vectors
        per_slot: dict[int, list[int]] = defaultdict(list)
        split: dict[int, list] = defaultdict(list)
        for res, pos, value, slot in members:
            seen = per_slot[slot]
            if value not in seen:
                seen.append(value)
            split[seen.index(value)].append((res, pos, value, slot))
        ident = 0 if key[0] == "hl.add" else 1
        for sub in split.values():
            if len(sub) < 2 or len({v for _, _, v, _ in sub}) == 1:
                continue
            vals = [ident] * n
            for _, _, value, slot in sub:
                vals[slot] = value % t
            gi = len(vectors)
            vectors.append(tuple(vals))
            for res, pos, _, slot in sub:
                plan[res] = (gi, pos, slot)
    if not plan:
        return f

    rw = Rewriter(f)
    emitted: dict[int, int] = {}
    for op in f.ops:
        p = plan.get(op.result)
        if p is None:
            rw.append(op)
            continue
        gi, pos, slot = p
        if gi not in emitted:
            emitted[gi] = rw.emit("bsf.vconst", (), pvec_t(n), (("values", vectors[gi]),))
        x = rw.emit("hl.extract", (emitted[gi],), PINT_T, (("slot", slot),))
        operands = list(op.operands)
        operands[pos] = x
        rw.append(IrOp(op.result, op.name, tuple(operands), op.attrs, op.type))
    return dce(rw.finish())
