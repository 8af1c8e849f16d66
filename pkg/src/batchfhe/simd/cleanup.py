"""Post-translation cleanup: simplify to a fixpoint and collapse insert chains."""

from __future__ import annotations

from ..ir.core import BINT, IrFunction, dce
from ..ir.passes import simplify

MAX_ROUNDS = 20


def chain_writes(f: IrFunction, end: int) -> tuple[dict[int, int], int]:
    """Slot -> inserted value for the insert chain ending at ``end`` (latest write wins), and its base."""
    defs = f.defs
    writes: dict[int, int] = {}
    cur = defs.get(end)
    base = end
    while cur is not None and cur.name == "hl.insert":
        writes.setdefault(cur.attr("slot"), cur.operands[0])
        base = cur.operands[1]
        cur = defs.get(base)
    return writes, base


def collapse_full_chains(f: IrFunction) -> IrFunction:
    """Replace an insert chain writing ``extract(W, i)`` into every slot i by W itself."""
    n = f.slots
    defs = f.defs
    users = f.users
    subst: dict[int, int] = {}
    for op in f.ops:
        if op.name != "hl.insert":
            continue
        if any(u.name == "hl.insert" and u.operands[1] == op.result for u in users.get(op.result, ())):
            continue  # not the end of its chain
        writes, _ = chain_writes(f, op.result)
        if len(writes) != n:
            continue
        common = None
        for slot, v in writes.items():
            d = defs.get(v)
            if d is None or d.name != "hl.extract" or d.attr("slot") != slot:
                break
            w = d.operands[0]
            if common is None:
                common = w
            elif w != common:
                break
        else:
            if common is not None and f.type_of(common).kind == BINT:
                subst[op.result] = common
    if not subst:
        return f
    ops = []
    for op in f.ops:
        if any(v in subst for v in op.operands):
            op = type(op)(op.result, op.name, tuple(subst.get(v, v) for v in op.operands), op.attrs, op.type)
        ops.append(op)
    return dce(f.replace(ops=ops, ret=subst.get(f.ret, f.ret)))


def cleanup(f: IrFunction) -> IrFunction:
    """Fold, canonicalize, CSE and simplify extract/insert pairs until nothing changes."""
    for _ in range(MAX_ROUNDS):
        g = simplify(f, fold=True, canon=True, cse=True, peephole=True)
        g = collapse_full_chains(g)
        if g.structurally_equal(f):
            return g
        f = g
    return f
