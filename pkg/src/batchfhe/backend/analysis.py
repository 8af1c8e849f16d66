"""Static analyses of circuits: depth, noise, parameter choice, cost."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..config import Config, default_config
from ..errors import ParameterError
from .circuit import (CT_ADD, CT_MUL, CT_SUB, NEGATE, PT_ADD, PT_CONST, PT_MUL, PT_SUB, RELIN, ROTATE,
                      CircuitFunction)

# depth contributed by one op
_DEPTH = {CT_MUL: 1.0, PT_MUL: 0.5}

# noise rule per kind: which config key, and whether ciphertext operands combine by max or sum
_NOISE_RULE = {
    CT_ADD: ("ct_add", "max"),
    CT_SUB: ("ct_add", "max"),
    PT_ADD: ("pt_add", "max"),
    PT_SUB: ("pt_add", "max"),
    CT_MUL: ("ct_mul", "sum"),
    PT_MUL: ("pt_mul", "max"),
    ROTATE: ("rotate", "max"),
    RELIN: ("relinearize", "max"),
    NEGATE: ("negate", "max"),
}


@dataclass(frozen=True)
class SchemeParams:
    name: str
    slots: int
    modulus: int
    budget: int

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.slots, "t": self.modulus, "budget": self.budget}


def analyze_depth(c: CircuitFunction) -> dict[int, float]:
    """Multiplicative depth of each output: ct-ct mul 1, ct-pt mul 0.5, everything else 0."""
    depth: dict[int, float] = {i.id: 0.0 for i in c.inputs}
    for op in c.ops:
        d = max((depth[v] for v in op.operands), default=0.0)
        depth[op.id] = d + _DEPTH.get(op.kind, 0.0)
    return {o: depth[o] for o in c.outputs}


def circuit_depth(c: CircuitFunction) -> float:
    return max(analyze_depth(c).values(), default=0.0)


def op_noise(kind: str, operand_noise: list[int], cfg: Config) -> int:
    """Noise of an op's result given its ciphertext operands' noise (plaintexts carry 0)."""
    key, combine = _NOISE_RULE[kind]
    base = sum(operand_noise) if combine == "sum" else max(operand_noise, default=0)
    return base + cfg.noise[key]


def analyze_noise(c: CircuitFunction, cfg: Optional[Config] = None) -> dict[int, int]:
    """Worst-case noise of every ciphertext value (inputs start fresh)."""
    cfg = cfg or default_config()
    noise: dict[int, int] = {}
    for i in c.inputs:
        if i.kind == "ct":
            noise[i.id] = cfg.noise["fresh"]
    for op in c.ops:
        if op.kind == PT_CONST:
            continue
        noise[op.id] = op_noise(op.kind, [noise[v] for v in op.operands if v in noise], cfg)
    return noise


def peak_noise(c: CircuitFunction, cfg: Optional[Config] = None) -> int:
    return max(analyze_noise(c, cfg).values(), default=0)


def chain_noise(depth: float, cfg: Optional[Config] = None) -> int:
    """Noise after ``depth`` ct-ct muls in a chain, each against a fresh ciphertext and relinearized."""
    cfg = cfg or default_config()
    fresh = cfg.noise["fresh"]
    step = fresh + cfg.noise["ct_mul"] + cfg.noise["relinearize"]
    return fresh + int(round(depth * step))


def select_parameters(depth: float, peak: Optional[int] = None, slots: int = 0,
                      cfg: Optional[Config] = None) -> SchemeParams:
    """Smallest parameter row whose budget holds the noise.

    The noise is ``peak`` when the circuit's own worst case is known, else the
    noise of a mul chain of the given depth.
    """
    cfg = cfg or default_config()
    if depth < 0:
        raise ValueError("depth must be non-negative")
    need = peak if peak is not None else chain_noise(depth, cfg)
    for row in cfg.parameters:
        if row.budget >= need:
            return SchemeParams(row.name, slots, cfg.plaintext_modulus, row.budget)
    largest = cfg.parameters[-1] if cfg.parameters else None
    raise ParameterError(
        f"depth exceeds largest parameter set: needs noise budget {need}"
        + (f", largest is {largest.name} ({largest.budget})" if largest else ""))


def params_by_name(name: str, slots: int = 0, cfg: Optional[Config] = None) -> SchemeParams:
    cfg = cfg or default_config()
    row = cfg.row(name)
    return SchemeParams(row.name, slots, cfg.plaintext_modulus, row.budget)


@dataclass
class CostReport:
    counts: dict[str, int]
    depth: float
    weighted_cost: int
    params: Optional[SchemeParams]
    compile_ms: dict[str, float] = field(default_factory=dict)
    square_count: int = 0
    peak_noise: int = 0

    @property
    def total_ops(self) -> int:
        """Every op except plaintext encodings."""
        return sum(v for k, v in self.counts.items() if k != PT_CONST)

    def to_json(self) -> dict:
        return {
            "counts": dict(self.counts),
            "depth": self.depth,
            "weighted_cost": self.weighted_cost,
            "params": self.params.to_json() if self.params else None,
            "compile_ms": {k: round(v, 3) for k, v in self.compile_ms.items()},
            "square_count": self.square_count,
            "peak_noise": self.peak_noise,
        }


def estimate_cost(c: CircuitFunction, cfg: Optional[Config] = None,
                  params: Optional[SchemeParams] = None, select: bool = True) -> CostReport:
    """Tally ops, weigh them, and (unless given or disabled) pick parameters."""
    cfg = cfg or default_config()
    counts = c.counts()
    weighted = sum(cfg.weights.get(k, 0) * v for k, v in counts.items())
    depth = circuit_depth(c)
    peak = peak_noise(c, cfg)
    if params is None and select:
        try:
            params = select_parameters(depth, peak, c.slots, cfg)
        except ParameterError:
            params = None
    squares = sum(1 for op in c.ops if op.kind == CT_MUL and op.operands[0] == op.operands[1])
    return CostReport(counts, depth, weighted, params, {}, squares, peak)
