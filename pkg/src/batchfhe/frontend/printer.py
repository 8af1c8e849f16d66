"""Source printer; ``parse(print_program(p)) == p`` for every parsed program."""

from __future__ import annotations

from . import ast

_PREC = {"<<": 1, "+": 2, "-": 2, "*": 3}


def print_expr(e, parent: int = 0, right: bool = False) -> str:
    if isinstance(e, ast.Literal):
        return str(e.value)
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Neg):
        inner = print_expr(e.operand, 4)
        return f"(-{inner})" if parent >= 5 else f"-{inner}"
    if isinstance(e, ast.Index):
        if e.modulus is not None:
            # parenthesized so the modulus visibly applies to the whole index
            idx, mod = print_expr(e.index, 4), print_expr(e.modulus, 5)
            return f"{e.name}[{idx} % {mod}]"
        return f"{e.name}[{print_expr(e.index)}]"
    if isinstance(e, ast.Call):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, ast.Binary):
        p = _PREC[e.op]
        text = f"{print_expr(e.lhs, p)} {e.op} {print_expr(e.rhs, p, right=True)}"
        # all binary operators are left-associative
        if p < parent or (right and p == parent):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def _type(t: ast.TypeSpec) -> str:
    s = "secret int" if t.secret else "int"
    if t.length is not None:
        s += f"[{print_expr(t.length)}]"
    return s


def _stmt(s, indent: str) -> list[str]:
    if isinstance(s, ast.Decl):
        if s.init is None:
            return [f"{indent}{_type(s.type)} {s.name};"]
        if isinstance(s.init, ast.ArrayLit):
            items = ", ".join(print_expr(i) for i in s.init.items)
            return [f"{indent}{_type(s.type)} {s.name} = {{{items}}};"]
        return [f"{indent}{_type(s.type)} {s.name} = {print_expr(s.init)};"]
    if isinstance(s, ast.Assign):
        return [f"{indent}{s.name} {s.op} {print_expr(s.value)};"]
    if isinstance(s, ast.IndexAssign):
        return [f"{indent}{print_expr(s.target)} {s.op} {print_expr(s.value)};"]
    if isinstance(s, ast.Return):
        return [f"{indent}return {print_expr(s.value)};"]
    if isinstance(s, ast.For):
        head = f"{indent}for {s.var} in {print_expr(s.lo)}..{print_expr(s.hi)}: {{"
        lines = [head]
        for b in s.body:
            lines += _stmt(b, indent + "    ")
        lines.append(f"{indent}}}")
        return lines
    raise TypeError(f"not a statement: {s!r}")


def print_program(p: ast.Program) -> str:
    lines = [f"const {c.name} = {print_expr(c.value)};" for c in p.consts]
    for f in p.functions:
        if lines:
            lines.append("")
        params = ", ".join(f"{_type(q.type)} {q.name}" for q in f.params)
        lines.append(f"{_type(f.ret_type)} {f.name}({params}) {{")
        for s in f.body:
            lines += _stmt(s, "    ")
        lines.append("}")
    return "\n".join(lines) + "\n"
