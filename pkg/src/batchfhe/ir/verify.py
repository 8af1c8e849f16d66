"""IR verifier: SSA shape, operand typing, attribute ranges, dialect whitelist."""

from __future__ import annotations

from typing import Iterable, Optional

from .core import BINT, INDEX, PINT, PVEC, SINT, TENSOR, IrFunction

# name -> (min operands, max operands or None)
ARITY: dict[str, tuple[int, Optional[int]]] = {
    "hl.extract": (1, 1),
    "hl.insert": (2, 2),
    "hl.add": (2, None),
    "hl.sub": (2, 2),
    "hl.mul": (2, None),
    "hl.const": (0, 0),
    "bsf.add": (2, None),
    "bsf.sub": (2, 2),
    "bsf.mul": (2, None),
    "bsf.rotate": (1, 1),
    "bsf.vconst": (0, 0),
    "bsf.splat": (0, 0),
}

_SCALAR = {SINT, PINT}
_VECTOR = {TENSOR, BINT, PVEC}

STAGE_DIALECTS = {
    "hl": frozenset({"hl", "bsf.vconst", "bsf.splat"}),
    "mixed": frozenset({"hl", "bsf"}),
    "bsf": frozenset({"bsf"}),
}


def verify(f: IrFunction, dialects: Optional[Iterable[str]] = None) -> list[str]:
    """Return every invariant violation found in ``f`` (empty list when clean)."""
    errs: list[str] = []
    n = f.slots
    t = f.modulus
    types = {}
    for p in f.params:
        if p.id in types:
            errs.append(f"%{p.id}: defined twice")
        types[p.id] = p.type
        if p.layout not in ("scalar", "vector"):
            errs.append(f"%{p.id}: bad layout {p.layout!r}")
    allowed = None if dialects is None else frozenset(dialects)
    for op in f.ops:
        where = f"%{op.result} = {op.name}"
        if op.name not in ARITY:
            errs.append(f"{where}: unknown op")
            continue
        dialect, _, kind = op.name.partition(".")
        if allowed is not None and dialect not in allowed and op.name not in allowed:
            errs.append(f"{where}: op not allowed at this stage")
        lo, hi = ARITY[op.name]
        if len(op.operands) < lo or (hi is not None and len(op.operands) > hi):
            errs.append(f"{where}: wrong operand count {len(op.operands)}")
        for v in op.operands:
            if v not in types:
                errs.append(f"{where}: use before def of %{v}")
        if op.result in types:
            errs.append(f"{where}: %{op.result} defined twice")
        if op.type.kind == INDEX:
            errs.append(f"{where}: index-typed values are attributes only")
        if op.type.kind in _VECTOR and op.type.slots != n:
            errs.append(f"{where}: vector width {op.type.slots} != function width {n}")
        ot = [types.get(v) for v in op.operands]
        if op.name == "hl.extract":
            s = op.attr("slot")
            if not isinstance(s, int) or not 0 <= s < n:
                errs.append(f"{where}: slot {s!r} out of range [0, {n})")
            if ot and ot[0] is not None and ot[0].kind not in _VECTOR:
                errs.append(f"{where}: extract from non-vector")
            if op.type.kind not in _SCALAR:
                errs.append(f"{where}: extract must yield a scalar")
        elif op.name == "hl.insert":
            s = op.attr("slot")
            if not isinstance(s, int) or not 0 <= s < n:
                errs.append(f"{where}: slot {s!r} out of range [0, {n})")
            if len(ot) == 2 and None not in ot:
                if ot[0].kind not in _SCALAR:
                    errs.append(f"{where}: inserted value must be scalar")
                if ot[1].kind not in _VECTOR:
                    errs.append(f"{where}: insert into non-vector")
            if op.type.kind not in _VECTOR:
                errs.append(f"{where}: insert must yield a vector")
        elif op.name == "bsf.rotate":
            k = op.attr("offset")
            if not isinstance(k, int) or not 0 <= k < n:
                errs.append(f"{where}: unnormalized rotation {k!r}")
            if ot and ot[0] is not None and ot[0].kind not in (BINT, PVEC):
                errs.append(f"{where}: rotate of non-batched value")
        elif op.name == "hl.const" or op.name == "bsf.splat":
            v = op.attr("value")
            if not isinstance(v, int) or not 0 <= v < t:
                errs.append(f"{where}: constant {v!r} not reduced mod {t}")
        elif op.name == "bsf.vconst":
            vals = op.attr("values")
            if not isinstance(vals, tuple) or len(vals) != n or any(not 0 <= x < t for x in vals):
                errs.append(f"{where}: plaintext vector must hold {n} values in [0, {t})")
        elif dialect == "hl":
            if any(x is not None and x.kind not in _SCALAR for x in ot):
                errs.append(f"{where}: element arithmetic on non-scalar operand")
            secret = any(x is not None and x.kind == SINT for x in ot)
            if secret and op.type.kind != SINT:
                errs.append(f"{where}: secret operands must give a secret result")
        elif dialect == "bsf" and kind in ("add", "sub", "mul"):
            if any(x is not None and x.kind not in (BINT, PVEC) for x in ot):
                errs.append(f"{where}: SIMD arithmetic on non-batched operand")
            if op.type.kind != BINT:
                errs.append(f"{where}: SIMD arithmetic must yield a batched value")
        types[op.result] = op.type
    if f.ret not in types:
        errs.append(f"return of undefined %{f.ret}")
    if f.ret_layout not in ("scalar", "vector"):
        errs.append(f"bad return layout {f.ret_layout!r}")
    return errs


def check(f: IrFunction, dialects: Optional[Iterable[str]] = None, where: str = "") -> IrFunction:
    """Raise :class:`PipelineError` if ``f`` does not verify; return ``f``."""
    from ..errors import PipelineError

    errs = verify(f, dialects)
    if errs:
        head = f"IR verification failed{' after ' + where if where else ''}"
        raise PipelineError(head + ":\n  " + "\n  ".join(errs[:20]))
    return f
