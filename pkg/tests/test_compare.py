from __future__ import annotations

import json

import numpy as np

import batchfhe.simd.simdify as simdify_mod
from batchfhe.compare import compare_source, shrink_input
from batchfhe.corpus import CORPUS

from conftest import small_config


def test_corpus_passes():
    for name in CORPUS:
        res = compare_source(CORPUS[name].source(), small_config(name), trials=20)
        assert res.passed and res.trials == 20 and not res.warnings


def test_zero_trials_warns():
    res = compare_source(CORPUS["dot-product"].source(), trials=0)
    assert res.passed and res.warnings


def test_mutated_offset_is_caught(monkeypatch):
    # the sign of the alignment offset flipped: reads the wrong neighbours
    monkeypatch.setattr(simdify_mod, "alignment_offset", lambda s, t, m: (t - s) % m)
    pc = small_config("roberts-cross")
    pc.defines["N"] = 64
    res = compare_source(CORPUS["roberts-cross"].source(), pc, trials=50, seed=3)
    assert not res.passed
    d = res.divergence
    assert d.stage.startswith("simdify")
    assert d.expected != d.actual and d.expected[d.position] != d.actual[d.position]
    nonzero = [v for v in d.inputs["img"] if v]
    assert len(nonzero) == 1  # shrunk to a single lit pixel
    doc = json.loads(json.dumps(res.to_json()))
    assert doc["passed"] is False and doc["divergence"]["stage"] == d.stage


def test_shrink_minimises():
    x = {"v": np.array([[5, 9, 0, 7, 3, 8]]), "s": np.array([4])}

    def diverges(b):
        return (b["v"][:, 3] >= 2) & (b["s"] > 0)

    out = shrink_input(x, diverges)
    assert out["v"].tolist() == [[0, 0, 0, 7, 0, 0]]
    assert out["s"].tolist() == [1]
    assert diverges(out)[0]


def test_shrink_keeps_failing_input():
    x = {"v": np.array([[3, 1]])}
    out = shrink_input(x, lambda b: (b["v"] == [3, 1]).all(axis=1))
    assert out["v"].tolist() == [[3, 1]]
