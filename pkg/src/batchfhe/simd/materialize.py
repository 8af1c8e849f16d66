"""Lowering of the remaining virtual ops to rotations and plaintext masks.

* Any element-wise op still present (SIMD translation was skipped) is first
  translated with every op computed in slot 0.
* An insert chain becomes ``base·(1-χ) + Σ_g W_g·χ_g``: the written slots are
  grouped by the (rotated) vector they read from, one mask per group.
* A scalar ``extract(v, i)`` becomes ``rotate(v, i)``, bringing slot i to 0.
"""

from __future__ import annotations

from ..ir.core import BINT, IrFunction, IrOp, Rewriter, bint_t, dce, pvec_t
from ..ir.passes import simplify
from .simdify import has_scalar_arith, translate


def materialize_virtuals(f: IrFunction) -> IrFunction:
    if has_scalar_arith(f):
        f = translate(f, strawman=True)
    n = f.slots
    orig = f.defs
    users = f.users
    rw = Rewriter(f)
    splats: dict[int, int] = {}

    def splat(value: int) -> int:
        if value not in splats:
            splats[value] = rw.emit("bsf.splat", (), pvec_t(n), (("value", value),))
        return splats[value]

    def source(v: int) -> tuple[int, int | None]:
        """(vector, slot) the scalar ``v`` reads, in rewritten ids; slot None for broadcasts."""
        d = orig.get(v)
        if d is not None and d.name == "hl.extract":
            return rw.get(d.operands[0]), d.attr("slot")
        if d is not None and d.name == "hl.const":
            return splat(d.attr("value")), None
        p = next(p for p in f.params if p.id == v)
        return v, (0 if p.type.kind == BINT else None)

    def is_chain_link(op: IrOp) -> bool:
        us = users.get(op.result, ())
        return op.result != f.ret and all(u.name == "hl.insert" and u.operands[0] != op.result for u in us)

    rotations: dict[tuple[int, int], int] = {}

    def rotate(v: int, k: int) -> int:
        k %= n
        if k == 0:
            return v
        key = (v, k)
        if key not in rotations:
            rotations[key] = rw.emit("bsf.rotate", (v,), rw.type_of(v), (("offset", k),))
        return rotations[key]

    for op in f.ops:
        name = op.name
        if name == "hl.extract":
            # scalar convention: bring the slot to position 0
            rw.subst[op.result] = rotate(rw.get(op.operands[0]), op.attr("slot"))
        elif name == "hl.const":
            rw.subst[op.result] = splat(op.attr("value"))
        elif name == "hl.insert":
            if is_chain_link(op) and users.get(op.result):
                continue  # folded into the chain end
            writes: dict[int, int] = {}
            cur = op
            while cur is not None and cur.name == "hl.insert":
                writes.setdefault(cur.attr("slot"), cur.operands[0])
                base = cur.operands[1]
                cur = orig.get(base)
            groups: dict[int, list[int]] = {}
            for slot, v in writes.items():
                w, j = source(v)
                if j is not None and j != slot:
                    w = rotate(w, j - slot)
                groups.setdefault(w, []).append(slot)
            keep = tuple(0 if s in writes else 1 for s in range(n))
            terms = []
            if any(keep):
                mask = rw.emit("bsf.vconst", (), pvec_t(n), (("values", keep),))
                terms.append(rw.emit("bsf.mul", (rw.get(base), mask), bint_t(n)))
            for w, slots in groups.items():
                sel = set(slots)
                if len(sel) == n:
                    terms.append(w)
                    continue
                chi = tuple(1 if s in sel else 0 for s in range(n))
                mask = rw.emit("bsf.vconst", (), pvec_t(n), (("values", chi),))
                terms.append(rw.emit("bsf.mul", (w, mask), bint_t(n)))
            if len(terms) == 1:
                rw.subst[op.result] = terms[0]
            else:
                rw.subst[op.result] = rw.emit("bsf.add", terms, bint_t(n))
        else:
            rw.append(IrOp(op.result, name, tuple(rw.get(v) for v in op.operands), op.attrs, op.type))
    out = dce(rw.finish())
    return simplify(out, fold=True, canon=True)
