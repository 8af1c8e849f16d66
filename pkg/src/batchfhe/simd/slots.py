"""Slot demand and target-slot choice for element-wise ops.

A *demand* is the slot in which a consumer wants a value: the slot of an
insert that stores it (direct), or, for a value whose only user is another
arithmetic op, that op's demand (inherited).  Inheriting lets the leaves of
an expression tree compute in place at the slot the tree is finally stored
to, rather than at the first operand's slot and then moving the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..ir.core import IrFunction

ARITH = frozenset({"hl.add", "hl.sub", "hl.mul"})


@dataclass(frozen=True)
class Demand:
    slot: int
    direct: bool
    root: int  # base value of the insert chain the result ends up in


@dataclass(frozen=True)
class Operand:
    """Where an operand's meaningful value lives.

    ``slot`` None means every slot holds it (splats); ``secret`` False means
    moving it is free because plaintexts can be re-encoded in any order.
    """

    base: int
    slot: Optional[int]
    secret: bool


def chain_roots(f: IrFunction) -> dict[int, int]:
    """insert result -> the non-insert base its chain starts from."""
    roots: dict[int, int] = {}
    for op in f.ops:
        if op.name == "hl.insert":
            base = op.operands[1]
            roots[op.result] = roots.get(base, base)
    return roots


def slot_demands(f: IrFunction) -> dict[int, Demand]:
    """Demand for every value that has one."""
    roots = chain_roots(f)
    out: dict[int, Demand] = {}
    users = f.users
    for op in reversed(f.ops):
        r = op.result
        us = users.get(r, ())
        if r == f.ret:
            continue
        ins = [u for u in us if u.name == "hl.insert" and u.operands[0] == r]
        if ins:
            u = ins[0]
            out[r] = Demand(u.attr("slot"), True, roots[u.result])
        elif len(us) == 1 and us[0].name in ARITH:
            d = out.get(us[0].result)
            if d is not None:
                out[r] = Demand(d.slot, False, d.root)
    return out


def target_cost(operands: Sequence[Operand], demand: Optional[Demand], target: int) -> int:
    """Rotations needed to compute at ``target``: misaligned secret operands plus a moved result."""
    seen = {(o.base, o.slot) for o in operands if o.secret and o.slot is not None}
    cost = sum(1 for _, s in seen if s != target)
    if demand is not None and demand.slot != target:
        cost += 1
    return cost


def select_target_slot(operands: Sequence[Operand], demand: Optional[Demand]) -> int:
    """Cheapest slot to compute an element-wise op in.

    Candidates are the demanded slot and the secret operands' slots.  Ties go
    to a direct (insert) demand, then to the first secret operand's slot.
    With nothing slot-bound the answer is 0, where scalars live.
    """
    secret_slots = [o.slot for o in operands if o.secret and o.slot is not None]
    if not secret_slots and demand is None:
        return 0
    # distinct secret operands per slot, counted once
    per_slot: dict[int, int] = {}
    seen = set()
    for o in operands:
        if o.secret and o.slot is not None and (o.base, o.slot) not in seen:
            seen.add((o.base, o.slot))
            per_slot[o.slot] = per_slot.get(o.slot, 0) + 1
    total = len(seen)

    def cost(s: int) -> int:
        c = total - per_slot.get(s, 0)
        if demand is not None and demand.slot != s:
            c += 1
        return c

    order: list[int] = []
    if demand is not None and demand.direct:
        order.append(demand.slot)
    order.extend(dict.fromkeys(secret_slots))
    if demand is not None and not demand.direct:
        order.append(demand.slot)
    best = order[0]
    best_cost = cost(best)
    for s in order[1:]:
        c = cost(s)
        if c < best_cost:
            best, best_cost = s, c
    return best

