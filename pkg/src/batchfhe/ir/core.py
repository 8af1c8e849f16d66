"""Straight-line SSA: values, ops, functions.

Functions are immutable; passes build new ones through :class:`Rewriter`.
Dominance is list order, since there is no control flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union

AttrValue = Union[int, tuple]

# type kinds
SINT = "sint"      # secret scalar
PINT = "pint"      # plaintext scalar
TENSOR = "tensor"  # secret vector before batching
BINT = "bint"      # batched ciphertext
PVEC = "pvec"      # plaintext vector
INDEX = "index"    # slot index (attributes only)

_VECTOR_KINDS = frozenset({TENSOR, BINT, PVEC})
_SECRET_KINDS = frozenset({SINT, TENSOR, BINT})


@dataclass(frozen=True, slots=True)
class IrType:
    kind: str
    slots: int = 0

    @property
    def is_vector(self) -> bool:
        return self.kind in _VECTOR_KINDS

    @property
    def is_secret(self) -> bool:
        return self.kind in _SECRET_KINDS

    def __str__(self) -> str:
        return f"{self.kind}<{self.slots}>" if self.kind in _VECTOR_KINDS else self.kind


SINT_T = IrType(SINT)
PINT_T = IrType(PINT)
INDEX_T = IrType(INDEX)


def tensor_t(n: int) -> IrType:
    return IrType(TENSOR, n)


def bint_t(n: int) -> IrType:
    return IrType(BINT, n)


def pvec_t(n: int) -> IrType:
    return IrType(PVEC, n)


def parse_type(text: str) -> IrType:
    text = text.strip()
    if "<" in text:
        kind, rest = text.split("<", 1)
        if not rest.endswith(">") or kind not in _VECTOR_KINDS:
            raise ValueError(f"bad type {text!r}")
        return IrType(kind, int(rest[:-1]))
    if text not in (SINT, PINT, INDEX):
        raise ValueError(f"bad type {text!r}")
    return IrType(text)


@dataclass(frozen=True, slots=True)
class IrOp:
    result: int
    name: str  # "<dialect>.<kind>"
    operands: tuple[int, ...]
    attrs: tuple[tuple[str, AttrValue], ...]
    type: IrType

    @property
    def dialect(self) -> str:
        return self.name.split(".", 1)[0]

    @property
    def kind(self) -> str:
        return self.name.split(".", 1)[1]

    def attr(self, key: str, default=None):
        for k, v in self.attrs:
            if k == key:
                return v
        return default

    def key(self) -> tuple:
        """Structural identity used by CSE."""
        return (self.name, self.operands, self.attrs, self.type)


@dataclass(frozen=True, slots=True)
class Param:
    id: int
    name: str
    type: IrType
    layout: str  # "scalar" | "vector"


@dataclass(frozen=True)
class IrFunction:
    name: str
    params: tuple[Param, ...]
    ops: tuple[IrOp, ...]
    ret: int
    ret_layout: str
    slots: int
    modulus: int

    @cached_property
    def defs(self) -> dict[int, IrOp]:
        return {op.result: op for op in self.ops}

    @cached_property
    def param_ids(self) -> frozenset[int]:
        return frozenset(p.id for p in self.params)

    @cached_property
    def users(self) -> dict[int, list[IrOp]]:
        """value id -> ops using it (an op appears once per value even if repeated)."""
        out: dict[int, list[IrOp]] = {}
        for op in self.ops:
            for v in dict.fromkeys(op.operands):
                out.setdefault(v, []).append(op)
        return out

    @cached_property
    def use_counts(self) -> dict[int, int]:
        """value id -> number of distinct using ops, the return counting as one."""
        counts = {v: len(us) for v, us in self.users.items()}
        counts[self.ret] = counts.get(self.ret, 0) + 1
        return counts

    @property
    def next_id(self) -> int:
        ids = [p.id for p in self.params] + [op.result for op in self.ops]
        return max(ids, default=-1) + 1

    def type_of(self, v: int) -> IrType:
        op = self.defs.get(v)
        if op is not None:
            return op.type
        for p in self.params:
            if p.id == v:
                return p.type
        raise KeyError(f"%{v} is not defined")

    def count(self, name: str) -> int:
        return sum(1 for op in self.ops if op.name == name)

    def op_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for op in self.ops:
            out[op.name] = out.get(op.name, 0) + 1
        return out

    def structurally_equal(self, other: "IrFunction") -> bool:
        return (self.name, self.params, self.ops, self.ret, self.ret_layout, self.slots, self.modulus) == (
            other.name, other.params, other.ops, other.ret, other.ret_layout, other.slots, other.modulus)

    def replace(self, **kw) -> "IrFunction":
        fields = dict(name=self.name, params=self.params, ops=self.ops, ret=self.ret,
                      ret_layout=self.ret_layout, slots=self.slots, modulus=self.modulus)
        fields.update(kw)
        if not isinstance(fields["ops"], tuple):
            fields["ops"] = tuple(fields["ops"])
        return IrFunction(**fields)


def is_const(op: Optional[IrOp]) -> bool:
    return op is not None and op.name in ("hl.const", "bsf.splat", "bsf.vconst")


@dataclass
class Rewriter:
    """Accumulates a new op list while mapping old value ids to new ones."""

    f: IrFunction
    ops: list[IrOp] = field(default_factory=list)
    subst: dict[int, int] = field(default_factory=dict)
    defs: dict[int, IrOp] = field(default_factory=dict)
    next_id: int = -1

    def __post_init__(self):
        if self.next_id < 0:
            self.next_id = self.f.next_id
        self.types: dict[int, IrType] = {p.id: p.type for p in self.f.params}

    def get(self, v: int) -> int:
        s = self.subst.get(v)
        if s is None:
            return v
        # path compression
        seen = [v]
        while s in self.subst:
            seen.append(s)
            s = self.subst[s]
        for x in seen:
            self.subst[x] = s
        return s

    def fresh(self) -> int:
        r = self.next_id
        self.next_id += 1
        return r

    def append(self, op: IrOp) -> int:
        self.ops.append(op)
        self.defs[op.result] = op
        self.types[op.result] = op.type
        return op.result

    def emit(self, name: str, operands: Iterable[int], type: IrType,
             attrs: tuple = (), result: Optional[int] = None) -> int:
        if result is None:
            result = self.fresh()
        return self.append(IrOp(result, name, tuple(operands), attrs, type))

    def type_of(self, v: int) -> IrType:
        return self.types[v]

    def finish(self, ret: Optional[int] = None, **kw) -> IrFunction:
        r = self.get(self.f.ret if ret is None else ret)
        return self.f.replace(ops=tuple(self.ops), ret=r, **kw)


def dce(f: IrFunction) -> IrFunction:
    """Drop ops that do not contribute to the return value."""
    live = {f.ret}
    keep = []
    for op in reversed(f.ops):
        if op.result in live:
            keep.append(op)
            live.update(op.operands)
    if len(keep) == len(f.ops):
        return f
    keep.reverse()
    return f.replace(ops=tuple(keep))


def iter_values(f: IrFunction) -> Iterator[int]:
    for p in f.params:
        yield p.id
    for op in f.ops:
        yield op.result
