"""Generic rewrites: constant folding, canonicalization, CSE.

All three share one forward walk (:func:`simplify`) with the rule groups
switched on or off, so ``cleanup`` can run them together in a single sweep
while each named pass still does exactly its own job.
"""

from __future__ import annotations

from typing import Optional, Union

from .core import PINT_T, IrFunction, IrOp, Rewriter, dce, pvec_t

_COMMUTATIVE = frozenset({"hl.add", "hl.mul", "bsf.add", "bsf.mul"})
_CONST_NAMES = frozenset({"hl.const", "bsf.splat", "bsf.vconst"})


def _const_of(op: Optional[IrOp]):
    """('s', value) for scalar/splat constants, ('v', values) for vconst, else None."""
    if op is None:
        return None
    if op.name == "hl.const" or op.name == "bsf.splat":
        return ("s", op.attr("value"))
    if op.name == "bsf.vconst":
        return ("v", op.attr("values"))
    return None


class _Walker:
    def __init__(self, f: IrFunction, fold: bool, canon: bool, cse: bool, peephole: bool):
        self.f = f
        self.rw = Rewriter(f)
        self.n = f.slots
        self.t = f.modulus
        self.fold = fold
        self.canon = canon
        self.cse = cse
        self.peephole = peephole
        self.table: dict[tuple, int] = {}

    # constant construction

    def const(self, kind: str, value, vector: bool) -> int:
        """Emit (or reuse) a constant; ``kind`` is 's' or 'v'."""
        t = self.t
        if kind == "v":
            vals = tuple(int(x) % t for x in value)
            if len(set(vals)) == 1:
                kind, value = "s", vals[0]
            else:
                return self._emit_const("bsf.vconst", (("values", vals),), pvec_t(self.n))
        value = int(value) % t
        if vector:
            return self._emit_const("bsf.splat", (("value", value),), pvec_t(self.n))
        return self._emit_const("hl.const", (("value", value),), PINT_T)

    def _emit_const(self, name, attrs, ty) -> int:
        key = (name, (), attrs, ty)
        hit = self.table.get(key)
        if hit is not None:
            return hit
        r = self.rw.emit(name, (), ty, attrs)
        if self.cse:
            self.table[key] = r
        return r

    def cval(self, v: int):
        return _const_of(self.rw.defs.get(v))

    # rules; each returns an int (replacement value) or an IrOp to emit

    def rewrite(self, op: IrOp) -> Union[int, IrOp]:
        name = op.name
        if self.canon and name in _COMMUTATIVE:
            srt = tuple(sorted(op.operands, key=lambda v: (self.cval(v) is not None, v)))
            if srt != op.operands:
                op = IrOp(op.result, name, srt, op.attrs, op.type)
        if name in ("hl.add", "hl.mul", "bsf.add", "bsf.mul"):
            return self._nary(op)
        if name in ("hl.sub", "bsf.sub"):
            return self._sub(op)
        if name == "bsf.rotate":
            return self._rotate(op)
        if name == "hl.extract":
            return self._extract(op)
        if name == "bsf.vconst" and self.fold:
            vals = op.attr("values")
            if len(set(vals)) == 1:
                return IrOp(op.result, "bsf.splat", (), (("value", vals[0]),), op.type)
        return op

    def _nary(self, op: IrOp) -> Union[int, IrOp]:
        if not self.fold:
            return op
        t, n = self.t, self.n
        is_add = op.kind == "add"
        vector = op.dialect == "bsf"
        consts, rest = [], []
        for v in op.operands:
            c = self.cval(v)
            (consts if c is not None else rest).append((v, c))
        if not consts:
            return op
        if len(consts) == 1 and rest:
            # only identities to drop
            c = consts[0][1]
            ident = 0 if is_add else 1
            if c[0] == "s" and c[1] == ident:
                return rest[0][0] if len(rest) == 1 else IrOp(op.result, op.name, tuple(v for v, _ in rest), op.attrs, op.type)
            if c[0] == "v" and all(x == ident for x in c[1]):
                return rest[0][0] if len(rest) == 1 else IrOp(op.result, op.name, tuple(v for v, _ in rest), op.attrs, op.type)
            if not is_add and (c[1] == 0 if c[0] == "s" else all(x == 0 for x in c[1])):
                return self.const("s", 0, vector)
            return op
        # combine all constants into one
        if any(c[0] == "v" for _, c in consts):
            acc = [0 if is_add else 1] * n
            for _, c in consts:
                vals = c[1] if c[0] == "v" else (c[1],) * n
                acc = [(a + b) % t if is_add else (a * b) % t for a, b in zip(acc, vals)]
            combined = ("v", tuple(acc))
        else:
            acc_s = 0 if is_add else 1
            for _, c in consts:
                acc_s = (acc_s + c[1]) % t if is_add else (acc_s * c[1]) % t
            combined = ("s", acc_s)
        cid = self.const(combined[0], combined[1], vector)
        if not rest:
            return cid
        return self._nary(IrOp(op.result, op.name, tuple(v for v, _ in rest) + (cid,), op.attrs, op.type))

    def _sub(self, op: IrOp) -> Union[int, IrOp]:
        a, b = op.operands
        ca, cb = self.cval(a), self.cval(b)
        t, n = self.t, self.n
        vector = op.dialect == "bsf"
        if self.fold:
            if ca is not None and cb is not None:
                va = ca[1] if ca[0] == "v" else (ca[1],) * n
                vb = cb[1] if cb[0] == "v" else (cb[1],) * n
                if ca[0] == "s" and cb[0] == "s":
                    return self.const("s", (ca[1] - cb[1]) % t, vector)
                return self.const("v", tuple((x - y) % t for x, y in zip(va, vb)), vector)
            if cb is not None and (cb[1] == 0 if cb[0] == "s" else all(x == 0 for x in cb[1])):
                return a
        if self.canon and cb is not None:
            if cb[0] == "s":
                neg = self.const("s", (-cb[1]) % t, vector)
            else:
                neg = self.const("v", tuple((-x) % t for x in cb[1]), vector)
            add = IrOp(op.result, "bsf.add" if vector else "hl.add", (a, neg), op.attrs, op.type)
            return self.rewrite(add)
        return op

    def _rotate(self, op: IrOp) -> Union[int, IrOp]:
        (v,) = op.operands
        k = op.attr("offset") % self.n
        src = self.rw.defs.get(v)
        if self.canon and src is not None and src.name == "bsf.rotate":
            k = (k + src.attr("offset")) % self.n
            v = src.operands[0]
            op = IrOp(op.result, op.name, (v,), (("offset", k),), op.type)
            src = self.rw.defs.get(v)
        if self.fold or self.canon:
            if k == 0:
                return v
        if self.fold:
            c = _const_of(src)
            if c is not None:
                if c[0] == "s":
                    return v
                vals = c[1]
                return self.const("v", tuple(vals[(j + k) % self.n] for j in range(self.n)), True)
        return op

    def _extract(self, op: IrOp) -> Union[int, IrOp]:
        (v,) = op.operands
        slot = op.attr("slot")
        src = self.rw.defs.get(v)
        if self.fold:
            c = _const_of(src)
            if c is not None:
                return self.const("s", c[1] if c[0] == "s" else c[1][slot], False)
        if self.peephole and src is not None and src.name == "hl.insert":
            base = v
            while src is not None and src.name == "hl.insert":
                if src.attr("slot") == slot:
                    return src.operands[0]
                base = src.operands[1]
                src = self.rw.defs.get(base)
            return self._extract(IrOp(op.result, op.name, (base,), op.attrs, op.type))
        return op

    def run(self) -> IrFunction:
        rw = self.rw
        for op in self.f.ops:
            operands = tuple(rw.get(v) for v in op.operands)
            if operands != op.operands:
                op = IrOp(op.result, op.name, operands, op.attrs, op.type)
            res = self.rewrite(op)
            if isinstance(res, int):
                if res != op.result:
                    rw.subst[op.result] = res
                continue
            if self.cse:
                key = res.key()
                hit = self.table.get(key)
                if hit is not None:
                    rw.subst[op.result] = hit
                    continue
                self.table[key] = res.result
            rw.append(res)
        return rw.finish()


def simplify(f: IrFunction, *, fold=False, canon=False, cse=False, peephole=False) -> IrFunction:
    out = _Walker(f, fold, canon, cse, peephole).run()
    if canon:
        out = dce(out)
    return out


def cse(f: IrFunction) -> IrFunction:
    """Merge ops with identical (name, operands, attributes, type)."""
    return simplify(f, cse=True)


def constant_fold(f: IrFunction) -> IrFunction:
    """Evaluate constant-only ops mod t and apply x*1, x+0, x*0, rotate(v,0) identities."""
    return simplify(f, fold=True)


def canonicalize(f: IrFunction) -> IrFunction:
    """Sort commutative operands, compose rotations, turn sub-by-constant into add, drop dead ops."""
    return simplify(f, canon=True)
