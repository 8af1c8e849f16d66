from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from batchfhe.corpus import CORPUS
from batchfhe.errors import LexError, ParseError, TypeCheckError, UnrollError
from batchfhe.frontend import (
    DslType, TokenKind, check_types, compile_source, lower_function, parse, parse_expr, parse_source,
    print_expr, print_program, tokenize,
)
from batchfhe.frontend import ast

from conftest import vec_program


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)]


class TestLexer:
    def test_simple_expression(self):
        assert kinds("x + 1") == [(TokenKind.IDENT, "x"), (TokenKind.OP, "+"), (TokenKind.INT, "1"),
                                  (TokenKind.EOF, "")]

    def test_rotation_with_negative_amount(self):
        assert [k for k, _ in kinds("img << -n-1")][:-1] == [
            TokenKind.IDENT, TokenKind.OP, TokenKind.OP, TokenKind.IDENT, TokenKind.OP, TokenKind.INT]

    def test_malformed_literal(self):
        with pytest.raises(LexError) as e:
            tokenize("3a")
        assert (e.value.line, e.value.column) == (1, 1)

    def test_illegal_character_location(self):
        with pytest.raises(LexError) as e:
            tokenize("x +\n  @")
        assert (e.value.line, e.value.column) == (2, 3)

    def test_spans_reproduce_source(self):
        src = CORPUS["sharpening-filter"].source()
        toks = tokenize(src)
        for t in toks[:-1]:
            assert t.span.length > 0
            assert src[t.span.offset:t.span.offset + t.span.length] == t.text
        ends = [t.span.offset + t.span.length for t in toks[:-1]]
        assert all(a <= b.span.offset for a, b in zip(ends, toks[1:-1]))


class TestParser:
    def test_precedence(self):
        assert parse_expr("a+b*c") == ast.Binary("+", ast.Var("a"), ast.Binary("*", ast.Var("b"), ast.Var("c")))

    def test_shift_binds_loosest(self):
        e = parse_expr("x << n + 1")
        assert e.op == "<<" and e.rhs == ast.Binary("+", ast.Var("n"), ast.Literal(1))

    def test_sharpening_indexing(self):
        prog = parse_source(CORPUS["sharpening-filter"].source())
        (fn,) = prog.functions
        outer = next(s for s in fn.body if isinstance(s, ast.For))
        inner = next(s for s in outer.body if isinstance(s, ast.For))
        assert inner.var == "y"
        text = print_program(prog)
        assert "img[((x + i) * n + (y + j)) % N]" in text

    def test_missing_loop_body(self):
        with pytest.raises(ParseError) as e:
            parse_source("secret int f(secret int a) { for x in 0..n for }")
        assert "':'" in e.value.expected

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_print_parse_round_trip(self, name):
        prog = parse_source(CORPUS[name].source())
        assert parse_source(print_program(prog)) == prog


_names = st.sampled_from(["a", "b", "x", "n"])
_exprs = st.recursive(
    st.one_of(st.integers(0, 99).map(ast.Literal), _names.map(ast.Var)),
    lambda sub: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "<<"]), sub, sub).map(lambda t: ast.Binary(*t)),
        sub.map(ast.Neg),
        st.tuples(_names, sub).map(lambda t: ast.Index(t[0], t[1])),
    ),
    max_leaves=12,
)


@given(_exprs)
def test_expression_print_parse_round_trip(e):
    assert parse_expr(print_expr(e)) == e


class TestTypes:
    def check(self, body, params="secret int[16] x", ret="secret int"):
        return check_types(parse_source(f"{ret} f({params}) {{ {body} }}"))

    def test_secrecy_join(self):
        prog = self.check("secret int r = x[3] + 1; return r;")
        fn = prog.function()
        decl = fn.node.body[0]
        assert fn.type_of(decl.init) == DslType(True)

    def test_rotation_of_vector(self):
        prog = self.check("return x << 2;", ret="secret int[16]")
        fn = prog.function()
        assert fn.type_of(fn.node.body[0].value) == DslType(True, 16)

    def test_rotation_of_scalar_rejected(self):
        with pytest.raises(TypeCheckError):
            self.check("secret int y = x[0]; return y << 1;")

    def test_secret_into_plain_rejected(self):
        with pytest.raises(TypeCheckError):
            self.check("int p = x[0]; return x[1];")

    def test_non_power_of_two_width(self):
        with pytest.raises(TypeCheckError):
            self.check("return x[0];", params="secret int[12] x")

    def test_mismatched_widths(self):
        with pytest.raises(TypeCheckError):
            self.check("return x[0] + y[0];", params="secret int[16] x, secret int[8] y")

    def test_isqrt_must_be_exact(self):
        with pytest.raises(TypeCheckError):
            check_types(parse_source("const n = isqrt(10);\nsecret int f(secret int[16] x) { return x[0]; }"))


class TestLowering:
    def test_two_iteration_loop(self):
        _, f = compile_source(vec_program("secret int[N] z;\nfor i in 0..2: { z[i] = x[i] + y[i]; }\nreturn z;", 4))
        counts = f.op_counts()
        assert counts["hl.extract"] == 4 and counts["hl.add"] == 2 and counts["hl.insert"] == 2

    def test_sharpening_unrolls_every_tap(self):
        # the unrolled body has one extract, one multiply and one accumulate per tap
        src = CORPUS["sharpening-filter"].source()
        _, f = compile_source(src, {"N": 16})
        assert f.count("hl.mul") >= 16 * 9
        assert f.count("hl.insert") == 16

    def test_secret_loop_bound(self):
        src = "secret int f(secret int[4] x, secret int m) {\n secret int s = 0;\n for i in 0..m: { s += x[i]; }\n return s;\n}"
        with pytest.raises(UnrollError) as e:
            compile_source(src)
        assert e.value.line == 3

    def test_indices_constant_and_in_range(self):
        for name in CORPUS:
            _, f = compile_source(CORPUS[name].source(), {"N": 16} if CORPUS[name].image else None)
            for op in f.ops:
                if op.name in ("hl.extract", "hl.insert"):
                    assert 0 <= op.attr("slot") < f.slots

    def test_negative_index_wraps(self):
        src = vec_program("return x[(0 - 1) % N];", 8, ret="secret int")
        _, f = compile_source(src)
        assert [op.attr("slot") for op in f.ops if op.name == "hl.extract"] == [7]

    def test_out_of_range_index_without_modulo(self):
        with pytest.raises(UnrollError):
            compile_source(vec_program("return x[8];", 8, ret="secret int"))

    def test_lower_named_function(self):
        src = vec_program("return x[0];", 4, ret="secret int") + vec_program("return x[1];", 4, ret="secret int").replace("const N = 4;\n", "").replace(" f(", " g(")
        prog = check_types(parse(tokenize(src)))
        assert lower_function(prog, "g").name == "g"
