from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from batchfhe.corpus import CORPUS
from batchfhe.pipeline import PipelineConfig, compile_naive, compile_source

settings.register_profile("batchfhe", deadline=None, print_blob=True)
settings.load_profile("batchfhe")

# sizes small enough that every pass and the reference interpreter run quickly
SMALL_N = {"linear-polynomial": 16, "box-blur": 16, "gx-kernel": 16, "gy-kernel": 16,
           "roberts-cross": 16, "sharpening-filter": 16}


def small_config(name: str, **kw) -> PipelineConfig:
    n = SMALL_N.get(name)
    return PipelineConfig(defines={"N": n} if n else {}, **kw)


def compile_corpus(name: str, n: int | None = None, naive: bool = False, **kw):
    entry = CORPUS[name]
    pc = PipelineConfig(defines=entry.defines(n), **kw) if n else small_config(name, **kw)
    return (compile_naive if naive else compile_source)(entry.source(), pc)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def vec_program(body: str, n: int, ret: str = "secret int[N]", params: str | None = None) -> str:
    """Source of a one-function program over two secret vectors x, y of length N."""
    params = params or "secret int[N] x, secret int[N] y"
    return f"const N = {n};\n{ret} f({params}) {{\n{body}\n}}\n"


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
