"""Textual and JSON forms of :class:`IrFunction`.

Text layout::

    func @dot(%0 x: tensor<8> vector, %1 y: tensor<8> vector) -> scalar [n=8, t=65537] {
      %2 = hl.extract(%0) {slot=0} : sint
      ...
      return %17
    }
"""

from __future__ import annotations

import json
import re
from typing import Any

from ..errors import IrParseError
from .core import IrFunction, IrOp, Param, parse_type


def _fmt_attr(v) -> str:
    if isinstance(v, tuple):
        return "[" + ",".join(str(x) for x in v) + "]"
    return str(v)


def format_op(op: IrOp) -> str:
    args = ", ".join(f"%{v}" for v in op.operands)
    attrs = ""
    if op.attrs:
        attrs = " {" + ", ".join(f"{k}={_fmt_attr(v)}" for k, v in op.attrs) + "}"
    return f"%{op.result} = {op.name}({args}){attrs} : {op.type}"


def print_ir(f: IrFunction) -> str:
    params = ", ".join(f"%{p.id} {p.name}: {p.type} {p.layout}" for p in f.params)
    lines = [f"func @{f.name}({params}) -> {f.ret_layout} [n={f.slots}, t={f.modulus}] {{"]
    lines += [f"  {format_op(op)}" for op in f.ops]
    lines.append(f"  return %{f.ret}")
    lines.append("}")
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"^func @(\w+)\((.*)\) -> (scalar|vector) \[n=(\d+), t=(\d+)\] \{$")
_PARAM = re.compile(r"^%(\d+) (\w+): (\S+) (scalar|vector)$")
_OP = re.compile(r"^%(\d+) = (\w+\.\w+)\(([^)]*)\)(?: \{(.*)\})? : (\S+)$")
_ATTR = re.compile(r"(\w+)=(\[[^\]]*\]|-?\d+)")


def _parse_attrs(text: str, lineno: int) -> tuple:
    out = []
    pos = 0
    for m in _ATTR.finditer(text):
        if text[pos:m.start()].strip(", ") != "":
            raise IrParseError(f"malformed attributes {text!r}", lineno)
        pos = m.end()
        raw = m.group(2)
        if raw.startswith("["):
            body = raw[1:-1].strip()
            val: Any = tuple(int(x) for x in body.split(",")) if body else ()
        else:
            val = int(raw)
        out.append((m.group(1), val))
    if text[pos:].strip(", ") != "":
        raise IrParseError(f"malformed attributes {text!r}", lineno)
    return tuple(out)


def parse_ir(text: str) -> IrFunction:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise IrParseError("empty input")
    m = _HEADER.match(lines[0])
    if not m:
        raise IrParseError("expected 'func @name(...) -> layout [n=.., t=..] {'", 1)
    name, ptext, layout, n, t = m.groups()
    seen: set[int] = set()
    params = []
    if ptext.strip():
        for chunk in ptext.split(","):
            pm = _PARAM.match(chunk.strip())
            if not pm:
                raise IrParseError(f"malformed parameter {chunk.strip()!r}", 1)
            pid = int(pm.group(1))
            if pid in seen:
                raise IrParseError(f"duplicate value id %{pid}", 1)
            seen.add(pid)
            try:
                ptype = parse_type(pm.group(3))
            except ValueError as e:
                raise IrParseError(str(e), 1) from None
            params.append(Param(pid, pm.group(2), ptype, pm.group(4)))
    ops = []
    ret = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line == "}":
            if lineno != len(lines):
                raise IrParseError("trailing text after closing brace", lineno)
            break
        if ret is not None:
            raise IrParseError("op after return", lineno)
        if line.startswith("return "):
            rm = re.fullmatch(r"return %(\d+)", line)
            if not rm:
                raise IrParseError("malformed return", lineno)
            ret = int(rm.group(1))
            continue
        om = _OP.match(line)
        if not om:
            raise IrParseError(f"malformed op {line!r}", lineno)
        rid = int(om.group(1))
        if rid in seen:
            raise IrParseError(f"duplicate value id %{rid}", lineno)
        seen.add(rid)
        args = om.group(3).strip()
        operands = []
        if args:
            for a in args.split(","):
                a = a.strip()
                if not re.fullmatch(r"%\d+", a):
                    raise IrParseError(f"malformed operand {a!r}", lineno)
                operands.append(int(a[1:]))
        attrs = _parse_attrs(om.group(4), lineno) if om.group(4) else ()
        try:
            ty = parse_type(om.group(5))
        except ValueError as e:
            raise IrParseError(str(e), lineno) from None
        ops.append(IrOp(rid, om.group(2), tuple(operands), attrs, ty))
    else:
        raise IrParseError("missing closing brace", len(lines))
    if ret is None:
        raise IrParseError("missing return", len(lines))
    return IrFunction(name, tuple(params), tuple(ops), ret, layout, int(n), int(t))


def export_json(f: IrFunction) -> dict:
    return {
        "name": f.name,
        "params": [{"id": p.id, "name": p.name, "type": str(p.type), "layout": p.layout} for p in f.params],
        "ops": [
            {
                "id": op.result,
                "kind": op.name,
                "operands": list(op.operands),
                "attrs": {k: list(v) if isinstance(v, tuple) else v for k, v in op.attrs},
                "type": str(op.type),
            }
            for op in f.ops
        ],
        "ret": f.ret,
        "ret_layout": f.ret_layout,
        "slots": f.slots,
        "modulus": f.modulus,
    }


def import_json(doc: dict | str) -> IrFunction:
    if isinstance(doc, str):
        doc = json.loads(doc)
    params = tuple(Param(p["id"], p["name"], parse_type(p["type"]), p["layout"]) for p in doc["params"])
    ops = tuple(
        IrOp(o["id"], o["kind"], tuple(o["operands"]),
             tuple((k, tuple(v) if isinstance(v, list) else v) for k, v in o["attrs"].items()),
             parse_type(o["type"]))
        for o in doc["ops"]
    )
    return IrFunction(doc["name"], params, ops, doc["ret"], doc["ret_layout"], doc["slots"], doc["modulus"])
