"""Native BFV-style circuits and the lowerings that produce them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import PipelineError
from ..ir.core import BINT, PVEC, SINT, TENSOR, IrFunction

CT_ADD = "ct-ct add"
CT_SUB = "ct-ct sub"
CT_MUL = "ct-ct mul"
PT_ADD = "ct-pt add"
PT_SUB = "ct-pt sub"
PT_MUL = "ct-pt mul"
ROTATE = "rotate"
RELIN = "relinearize"
NEGATE = "negate"
PT_CONST = "pt-const"

KINDS = (CT_ADD, CT_SUB, CT_MUL, PT_ADD, PT_SUB, PT_MUL, ROTATE, RELIN, NEGATE, PT_CONST)
_CT_KINDS = {"add": CT_ADD, "sub": CT_SUB, "mul": CT_MUL}
_PT_KINDS = {"add": PT_ADD, "sub": PT_SUB, "mul": PT_MUL}


@dataclass(frozen=True)
class CircuitInput:
    id: int
    name: str
    kind: str  # "ct" | "pt"
    layout: str  # "vector": whole input; "scalar": slot 0 (ct) or every slot (pt)
    element: Optional[int] = None  # element of a vector input, for one-value-per-ciphertext circuits


@dataclass(frozen=True)
class CircuitOp:
    id: int
    kind: str
    operands: tuple[int, ...] = ()
    rotation: Optional[int] = None
    values: Optional[tuple[int, ...]] = None  # pt-const contents, one per slot


@dataclass
class CircuitFunction:
    name: str
    slots: int
    modulus: int
    inputs: list[CircuitInput]
    ops: list[CircuitOp]
    outputs: list[int]
    output_layout: str  # "scalar" | "vector"
    kinds: dict[int, str] = field(default_factory=dict)  # value id -> "ct" | "pt"

    def __post_init__(self):
        if not self.kinds:
            for i in self.inputs:
                self.kinds[i.id] = i.kind
            for op in self.ops:
                self.kinds[op.id] = "pt" if op.kind == PT_CONST else "ct"

    def counts(self) -> dict[str, int]:
        out = {k: 0 for k in KINDS}
        for op in self.ops:
            out[op.kind] += 1
        return out

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "slots": self.slots,
            "modulus": self.modulus,
            "inputs": [{"id": i.id, "name": i.name, "kind": i.kind, "layout": i.layout, "element": i.element}
                       for i in self.inputs],
            "ops": [_op_json(op) for op in self.ops],
            "outputs": list(self.outputs),
            "output_layout": self.output_layout,
        }


def _op_json(op: CircuitOp) -> dict:
    d: dict = {"id": op.id, "kind": op.kind, "operands": list(op.operands)}
    if op.rotation is not None:
        d["rotation"] = op.rotation
    if op.values is not None:
        vals = set(op.values)
        d["values"] = [op.values[0]] if len(vals) == 1 else list(op.values)
    return d


class _Builder:
    def __init__(self, n: int, t: int):
        self.n = n
        self.t = t
        self.ops: list[CircuitOp] = []
        self.kinds: dict[int, str] = {}
        self.next = 0
        self.consts: dict[tuple, int] = {}
        self.values: dict[int, tuple] = {}  # pt-const id -> contents

    def fresh(self) -> int:
        r = self.next
        self.next += 1
        return r

    def add_input(self, name, kind, layout, element=None) -> CircuitInput:
        i = CircuitInput(self.fresh(), name, kind, layout, element)
        self.kinds[i.id] = kind
        return i

    def emit(self, kind: str, operands=(), rotation=None, values=None) -> int:
        if kind == PT_CONST:
            hit = self.consts.get(values)
            if hit is not None:
                return hit
        r = self.fresh()
        self.ops.append(CircuitOp(r, kind, tuple(operands), rotation, values))
        self.kinds[r] = "pt" if kind == PT_CONST else "ct"
        if kind == PT_CONST:
            self.consts[values] = r
            self.values[r] = values
        return r

    def is_ct(self, v: int) -> bool:
        return self.kinds[v] == "ct"

    def const(self, values) -> int:
        return self.emit(PT_CONST, values=tuple(int(x) % self.t for x in values))

    def nary(self, kind: str, args: list[int]) -> int:
        """Balanced binary tree over the ciphertexts, then the plaintexts one at a time."""
        cts = [a for a in args if self.is_ct(a)]
        pts = [a for a in args if not self.is_ct(a)]
        if not cts:
            raise PipelineError(f"{kind} over plaintext operands only cannot be lowered")
        level = cts
        while len(level) > 1:
            nxt = [self.emit(_CT_KINDS[kind], (level[k], level[k + 1])) for k in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        acc = level[0]
        for p in pts:
            if kind == "mul" and self.const_splat(p) == self.t - 1:
                acc = self.emit(NEGATE, (acc,))
            else:
                acc = self.emit(_PT_KINDS[kind], (acc, p))
        return acc

    def const_splat(self, v: int) -> Optional[int]:
        vals = self.values.get(v)
        if vals is None or len(set(vals)) != 1:
            return None
        return vals[0]

    def sub(self, a: int, b: int) -> int:
        if self.is_ct(a) and self.is_ct(b):
            return self.emit(CT_SUB, (a, b))
        if self.is_ct(a):
            return self.emit(PT_SUB, (a, b))
        if self.is_ct(b):
            return self.emit(PT_ADD, (self.emit(NEGATE, (b,)), a))
        raise PipelineError("subtraction of two plaintexts cannot be lowered")


def lower_to_circuit(f: IrFunction) -> CircuitFunction:
    """Map ``bsf`` IR one-to-one onto native ops (n-ary ops become balanced trees)."""
    n, t = f.slots, f.modulus
    b = _Builder(n, t)
    env: dict[int, int] = {}
    inputs = []
    pt_params = set()
    for p in f.params:
        kind = "ct" if p.type.is_secret else "pt"
        i = b.add_input(p.name, kind, p.layout)
        inputs.append(i)
        env[p.id] = i.id
        if p.type.kind == PVEC:
            pt_params.add(i.id)
    for op in f.ops:
        args = [env[v] for v in op.operands]
        name = op.name
        if name == "bsf.splat":
            r = b.const((op.attr("value"),) * n)
        elif name == "bsf.vconst":
            r = b.const(op.attr("values"))
        elif name == "bsf.rotate":
            (v,) = args
            k = op.attr("offset") % n
            if b.is_ct(v):
                r = b.emit(ROTATE, (v,), rotation=k) if k else v
            elif v in pt_params:
                r = v  # broadcast plaintexts are rotation-invariant
            else:
                vals = b.values[v]
                r = b.const(tuple(vals[(j + k) % n] for j in range(n)))
        elif name in ("bsf.add", "bsf.mul"):
            r = b.nary(op.kind, args)
        elif name == "bsf.sub":
            r = b.sub(*args)
        else:
            raise PipelineError(f"cannot lower {name} to a circuit; run materialize first")
        env[op.result] = r
    out = env[f.ret]
    if not b.is_ct(out):
        raise PipelineError("function result does not depend on any secret input")
    return CircuitFunction(f.name, n, t, inputs, b.ops, [out], f.ret_layout, b.kinds)


def lower_naive(f: IrFunction) -> CircuitFunction:
    """One ciphertext per element, no batching: the textbook baseline.

    Takes high-level IR; vector reads and writes only re-route values.
    """
    n, t = f.slots, f.modulus
    b = _Builder(1, t)
    env: dict[int, object] = {}
    uses = f.use_counts
    param_ids = f.param_ids
    inputs = []
    for p in f.params:
        kind = "ct" if p.type.kind in (SINT, TENSOR, BINT) else "pt"
        if p.type.kind in (TENSOR, BINT) and p.layout == "vector":
            elems = [b.add_input(p.name, kind, "vector", j) for j in range(n)]
            inputs.extend(elems)
            env[p.id] = [e.id for e in elems]
        else:
            i = b.add_input(p.name, kind, "scalar")
            inputs.append(i)
            env[p.id] = i.id
    for op in f.ops:
        name = op.name
        if name == "hl.const":
            env[op.result] = b.const((op.attr("value"),))
        elif name == "bsf.splat":
            env[op.result] = [b.const((op.attr("value"),))] * n
        elif name == "bsf.vconst":
            env[op.result] = [b.const((x,)) for x in op.attr("values")]
        elif name == "hl.extract":
            env[op.result] = env[op.operands[0]][op.attr("slot")]
        elif name == "hl.insert":
            base = op.operands[1]
            # the previous chain link is dead after this write, so reuse its list
            vec = env[base] if uses.get(base) == 1 and base not in param_ids else list(env[base])
            vec[op.attr("slot")] = env[op.operands[0]]
            env[op.result] = vec
        elif name in ("hl.add", "hl.mul"):
            env[op.result] = b.nary(op.kind, [env[v] for v in op.operands])
        elif name == "hl.sub":
            env[op.result] = b.sub(env[op.operands[0]], env[op.operands[1]])
        else:
            raise PipelineError(f"naive lowering takes high-level IR, found {name}")
    out = env[f.ret]
    outs = list(out) if isinstance(out, list) else [out]
    return CircuitFunction(f.name, 1, t, inputs, b.ops, outs, f.ret_layout, b.kinds)


def insert_relinearization(c: CircuitFunction, policy: str = "always") -> CircuitFunction:
    """Follow every ct-ct mul with a relinearize (policy ``always``) or leave as is (``none``)."""
    if policy == "none":
        return c
    if policy != "always":
        raise ValueError(f"unknown relinearization policy {policy!r}")
    nxt = max([i.id for i in c.inputs] + [op.id for op in c.ops], default=-1) + 1
    remap: dict[int, int] = {}
    ops = []
    kinds = dict(c.kinds)
    for op in c.ops:
        if any(v in remap for v in op.operands):
            op = CircuitOp(op.id, op.kind, tuple(remap.get(v, v) for v in op.operands), op.rotation, op.values)
        ops.append(op)
        if op.kind == CT_MUL:
            ops.append(CircuitOp(nxt, RELIN, (op.id,)))
            kinds[nxt] = "ct"
            remap[op.id] = nxt
            nxt += 1
    outs = [remap.get(o, o) for o in c.outputs]
    return CircuitFunction(c.name, c.slots, c.modulus, list(c.inputs), ops, outs, c.output_layout, kinds)



def format_circuit(c: CircuitFunction) -> str:
    """Human-readable listing: inputs, one op per line, outputs."""
    lines = [f"circuit {c.name} slots={c.slots} t={c.modulus}"]
    for i in c.inputs:
        elem = f"[{i.element}]" if i.element is not None else ""
        lines.append(f"  input %{i.id} = {i.name}{elem} : {i.kind} {i.layout}")
    for op in c.ops:
        args = ", ".join(f"%{v}" for v in op.operands)
        extra = ""
        if op.rotation is not None:
            extra = f" by {op.rotation}"
        elif op.values is not None:
            vals = op.values
            if len(set(vals)) == 1:
                extra = f" splat {vals[0]}"
            else:
                shown = vals if len(vals) <= 16 else vals[:8]
                extra = " [" + " ".join(map(str, shown)) + (" ...]" if len(vals) > 16 else "]")
        lines.append(f"  %{op.id} = {op.kind}({args}){extra}")
    outs = ", ".join(f"%{o}" for o in c.outputs)
    lines.append(f"  return {outs} : {c.output_layout}")
    return "\n".join(lines)
