"""Rotate-and-reduce lowering of reductions over the slots of one vector.

An n-ary SIMD add (mul) whose operands include ``rotate(V, r)`` for residues
r = s, s+σ, ..., s+(m-1)σ (mod n) computes, in every slot j, the reduction
of V over {j + r}.  With m a power of two the same value comes from
log2(m) doubling steps, ``acc = op(acc, rotate(acc, d·σ))`` for
d = m/2, ..., 1, followed by one rotation by s.  Because the identity holds
at every slot, consumers need no adjustment.

When the progression is a full coset (m·σ = n) the result is periodic with
period σ, so a later ``extract(v, i)`` can read slot ``i mod σ`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..ir.core import BINT, IrFunction, IrOp, Rewriter, dce

FOLDABLE = frozenset({"bsf.add", "bsf.mul"})


@dataclass(frozen=True)
class FoldCandidate:
    base: int
    start: int
    stride: int
    count: int  # power of two

    def residues(self, n: int) -> list[int]:
        return [(self.start + k * self.stride) % n for k in range(self.count)]


def find_progression(residues: list[int], n: int) -> Optional[tuple[int, int]]:
    """(start, stride) if the distinct residues form s + kσ (mod n), k < m; else None.

    Full cosets (every gap equal) start at their smallest member.
    """
    r = sorted(set(residues))
    m = len(r)
    if m < 2 or m != len(residues):
        return None
    gaps = [(r[(k + 1) % m] - r[k]) % n or n for k in range(m)]
    if len(set(gaps)) == 1:
        return r[0], gaps[0]
    big = max(range(m), key=lambda k: gaps[k])
    others = {g for k, g in enumerate(gaps) if k != big}
    if len(others) != 1:
        return None
    return r[(big + 1) % m], others.pop()


def fold_candidate(residues: list[int], base: int, n: int) -> Optional[FoldCandidate]:
    """Largest power-of-two progression prefix worth folding, if any."""
    ap = find_progression(residues, n)
    if ap is None:
        return None
    start, stride = ap
    m = len(residues)
    p = 1 << (m.bit_length() - 1)
    if p < 2:
        return None
    cand = FoldCandidate(base, start, stride, p)
    full = p * stride == n
    shift = start % stride if full else start
    log = p.bit_length() - 1
    folded = 2 * log + (1 if shift % n else 0)
    linear = sum(1 for x in cand.residues(n) if x) + (p - 1)
    return cand if folded <= linear else None


def lower_folds(f: IrFunction) -> IrFunction:
    n = f.slots
    rw = Rewriter(f)
    period: dict[int, int] = {}  # rewritten id -> period of a full-coset fold result
    for op in f.ops:
        operands = tuple(rw.get(v) for v in op.operands)
        if op.name == "hl.extract" and operands[0] in period:
            slot = op.attr("slot") % period[operands[0]]
            rw.append(IrOp(op.result, op.name, operands, (("slot", slot),), op.type))
            continue
        if op.name not in FOLDABLE or len(operands) < 2:
            rw.append(IrOp(op.result, op.name, operands, op.attrs, op.type))
            continue
        groups: dict[int, list[tuple[int, int]]] = {}
        for v in operands:
            d = rw.defs.get(v)
            if d is not None and d.name == "bsf.rotate":
                base, r = d.operands[0], d.attr("offset")
            else:
                base, r = v, 0
            if rw.type_of(base).kind == BINT:
                groups.setdefault(base, []).append((r, v))
        used: set[int] = set()
        folded: list[int] = []
        periods: list[int] = []
        for base, members in groups.items():
            residues = [r for r, _ in members]
            cand = fold_candidate(residues, base, n)
            if cand is None:
                continue
            take = set(cand.residues(n))
            used.update(v for r, v in members if r in take)
            folded.append(_emit_fold(rw, op, cand, n))
            if cand.count * cand.stride == n:
                periods.append(cand.stride)
        if not folded:
            rw.append(IrOp(op.result, op.name, operands, op.attrs, op.type))
            continue
        rest = [v for v in operands if v not in used]
        args = folded + rest
        if len(args) == 1:
            rw.subst[op.result] = args[0]
            if periods:
                period[args[0]] = periods[0]
        else:
            rw.append(IrOp(op.result, op.name, tuple(args), op.attrs, op.type))
    return dce(rw.finish())


def _emit_fold(rw: Rewriter, op: IrOp, cand: FoldCandidate, n: int) -> int:
    ty = op.type
    acc = cand.base
    d = cand.count // 2
    while d >= 1:
        rot = rw.emit("bsf.rotate", (acc,), ty, (("offset", (d * cand.stride) % n),))
        acc = rw.emit(op.name, (acc, rot), ty)
        d //= 2
    full = cand.count * cand.stride == n
    shift = (cand.start % cand.stride if full else cand.start) % n
    if shift:
        acc = rw.emit("bsf.rotate", (acc,), ty, (("offset", shift),))
    return acc
