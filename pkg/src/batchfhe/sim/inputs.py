"""Seeded random inputs matching a function signature."""

from __future__ import annotations

import numpy as np

from ..frontend.typecheck import TypedFunction


def random_inputs(tf: TypedFunction, trials: int, t: int, rng: np.random.Generator,
                  high: int | None = None) -> dict[str, np.ndarray]:
    """One ``(trials,)`` or ``(trials, n)`` array per parameter, uniform in ``[0, high or t)``."""
    hi = t if high is None else high
    out = {}
    for p, ty in zip(tf.node.params, tf.param_types):
        shape = (trials, ty.length) if ty.is_vector else (trials,)
        out[p.name] = rng.integers(0, hi, size=shape, dtype=np.int64)
    return out


def trial(inputs: dict[str, np.ndarray], i: int) -> dict[str, object]:
    """The ``i``-th trial as plain JSON-able values."""
    return {k: v[i].tolist() if v.ndim == 2 else int(v[i]) for k, v in inputs.items()}
