"""In-place SIMD translation of element-wise ops.

Each scalar op over vector elements becomes one whole-vector op computed at
a target slot: operands living in other slots are rotated into it, and the
scalar result is re-exposed as ``extract(R, target)`` so later ops can keep
treating it as an element.  Ops from different loop iterations that read
the same vectors at the same relative offsets come out structurally
identical, which is what lets cleanup merge them.
"""

from __future__ import annotations

from ..ir.core import (BINT, PINT, PINT_T, PVEC, SINT, SINT_T, TENSOR, IrFunction, IrOp, Param, Rewriter,
                       bint_t, pvec_t)
from .slots import ARITH, Operand, select_target_slot, slot_demands


def alignment_offset(slot: int, target: int, n: int) -> int:
    """Rotation that brings the value in ``slot`` to ``target``: rotate(v, k)[target] = v[slot]."""
    return (slot - target) % n


def _param_type(p: Param, n: int) -> Param:
    k = p.type.kind
    if k == TENSOR:
        return Param(p.id, p.name, bint_t(n), p.layout)
    if k == SINT:
        return Param(p.id, p.name, bint_t(n), p.layout)  # slot 0 holds the value
    if k == PINT:
        return Param(p.id, p.name, pvec_t(n), p.layout)  # broadcast to every slot
    return p


class _Translator:
    def __init__(self, f: IrFunction, strawman: bool):
        self.n = f.slots
        self.strawman = strawman
        self.demands = {} if strawman else slot_demands(f)
        params = tuple(_param_type(p, self.n) for p in f.params)
        self.f = f.replace(params=params)
        self.rw = Rewriter(self.f)
        self.loc: dict[int, Operand] = {}
        self.splats: dict[int, int] = {}
        for p in params:
            if p.type.kind == BINT and p.layout == "scalar":
                self.loc[p.id] = Operand(p.id, 0, True)
            elif p.type.kind == PVEC and p.layout == "scalar":
                self.loc[p.id] = Operand(p.id, None, False)

    def splat(self, value: int) -> int:
        s = self.splats.get(value)
        if s is None:
            s = self.rw.emit("bsf.splat", (), pvec_t(self.n), (("value", value),))
            self.splats[value] = s
        return s

    def where(self, v: int) -> Operand:
        o = self.loc.get(v)
        if o is not None:
            return o
        d = self.rw.defs.get(v)
        if d is not None and d.name == "hl.const":
            o = Operand(self.splat(d.attr("value")), None, False)
            self.loc[v] = o
            return o
        raise ValueError(f"%{v} has no slot location")  # vector used as a scalar

    def rotate(self, v: int, k: int) -> int:
        if k == 0:
            return v
        return self.rw.emit("bsf.rotate", (v,), self.rw.type_of(v), (("offset", k),))

    def aligned(self, o: Operand, target: int) -> int:
        if o.slot is None:
            return o.base
        return self.rotate(o.base, alignment_offset(o.slot, target, self.n))

    def run(self) -> IrFunction:
        rw, n = self.rw, self.n
        for op in self.f.ops:
            operands = tuple(rw.get(v) for v in op.operands)
            name = op.name
            if name == "hl.extract":
                (v,) = operands
                src_t = rw.type_of(v)
                secret = src_t.is_secret
                r = rw.emit(name, (v,), SINT_T if secret else PINT_T, op.attrs, result=op.result)
                src = rw.defs.get(v)
                if src is not None and src.name == "bsf.splat":
                    self.loc[r] = Operand(v, None, False)
                else:
                    self.loc[r] = Operand(v, op.attr("slot"), secret)
            elif name in ARITH:
                ops = [self.where(v) for v in operands]
                target = 0 if self.strawman else select_target_slot(ops, self.demands.get(op.result))
                args = [self.aligned(o, target) for o in ops]
                res = rw.emit("bsf." + op.kind, args, bint_t(n))
                x = rw.emit("hl.extract", (res,), SINT_T, (("slot", target),), result=op.result)
                self.loc[x] = Operand(res, target, True)
            elif name == "hl.insert":
                s, base = operands
                i = op.attr("slot")
                o = self.where(s)
                if o.slot is None:
                    val = rw.emit("hl.extract", (o.base,), self.scalar_type(o.base), (("slot", i),))
                elif o.slot == i and self.is_extract(s, o.base, i):
                    val = s
                else:
                    w = self.rotate(o.base, alignment_offset(o.slot, i, n))
                    val = rw.emit("hl.extract", (w,), self.scalar_type(w), (("slot", i),))
                rw.emit(name, (val, base), bint_t(n), op.attrs, result=op.result)
            else:
                rw.append(IrOp(op.result, name, operands, op.attrs, op.type))
        return rw.finish()

    def scalar_type(self, v: int):
        return SINT_T if self.rw.type_of(v).is_secret else PINT_T

    def is_extract(self, s: int, base: int, slot: int) -> bool:
        d = self.rw.defs.get(s)
        return d is not None and d.name == "hl.extract" and d.operands[0] == base and d.attr("slot") == slot


def translate(f: IrFunction, strawman: bool = False) -> IrFunction:
    """SIMD-translate every element-wise op; ``strawman`` computes everything in slot 0."""
    return _Translator(f, strawman).run()


def simdify(f: IrFunction) -> IrFunction:
    return translate(f, strawman=False)


def has_scalar_arith(f: IrFunction) -> bool:
    return any(op.name in ARITH for op in f.ops)

