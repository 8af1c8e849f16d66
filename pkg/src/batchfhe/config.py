"""Cost weights, parameter table and noise rules.

The defaults live in ``default_config.json`` next to this module. A JSON file
named by the ``HECO_CONFIG`` environment variable (or passed explicitly) is
merged on top of them key by key, so a user file only needs the entries it
changes.  Recognised top-level keys:

``plaintext_modulus``
    odd prime t used for all slot arithmetic.
``weights``
    circuit op kind -> integer weight used by the cost model.
``parameters``
    ordered list of ``{"name": str, "budget": int}`` rows, smallest first.
``noise``
    integer noise increments: ``fresh``, ``ct_add``, ``pt_add``, ``ct_mul``,
    ``pt_mul``, ``rotate``, ``relinearize``, ``negate``.
"""

from __future__ import annotations

import functools
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

ENV_VAR = "HECO_CONFIG"


@dataclass(frozen=True)
class ParamRow:
    name: str
    budget: int


@dataclass(frozen=True)
class Config:
    plaintext_modulus: int = 65537
    weights: dict[str, int] = field(default_factory=dict)
    parameters: tuple[ParamRow, ...] = ()
    noise: dict[str, int] = field(default_factory=dict)

    def row(self, name: str) -> ParamRow:
        for r in self.parameters:
            if r.name.upper() == name.upper():
                return r
        raise KeyError(f"unknown parameter set {name!r}; known: {[r.name for r in self.parameters]}")


def _defaults() -> dict[str, Any]:
    text = resources.files("batchfhe").joinpath("default_config.json").read_text()
    return json.loads(text)


def _check_int(where: str, value: Any) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"config value {where} must be an integer, got {value!r}")
    return value


def load_config(path: str | os.PathLike | None = None) -> Config:
    """Load the defaults, then overlay ``path`` or ``$HECO_CONFIG`` if set."""
    raw = _defaults()
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path:
        user = json.loads(Path(path).read_text())
        for key, value in user.items():
            if key in ("weights", "noise"):
                raw[key] = {**raw[key], **value}
            elif key in ("parameters", "plaintext_modulus"):
                raw[key] = value
            else:
                raise ValueError(f"unknown config key {key!r}")

    weights = {k: _check_int(f"weights.{k}", v) for k, v in raw["weights"].items()}
    noise = {k: _check_int(f"noise.{k}", v) for k, v in raw["noise"].items()}
    rows = tuple(ParamRow(str(r["name"]), _check_int(f"parameters.{r['name']}", r["budget"])) for r in raw["parameters"])
    for r in rows:
        if r.budget <= 0:
            raise ValueError(f"parameter set {r.name} must have a positive budget")
    return Config(_check_int("plaintext_modulus", raw["plaintext_modulus"]), weights, rows, noise)


@functools.lru_cache(maxsize=8)
def _cached(path: str | None) -> Config:
    return load_config(path) if path else load_config("")


def default_config() -> Config:
    """The active configuration: defaults plus ``$HECO_CONFIG`` when set."""
    return _cached(os.environ.get(ENV_VAR) or None)
