"""Abstract operation taxonomy, weight tables and ledgers.

Every decoder kernel charges operations from a closed set of kinds.  A weight
table prices each kind in units of one 8-bit addition.  Message memory traffic
is tallied next to the operations but never enters the weighted total.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from decbench.data import data_path


class OpKind(enum.IntEnum):
    ADD8 = 0
    ADD16 = 1
    SUB8 = 2
    CMP = 3
    MIN2 = 4
    MAX2 = 5
    ABS = 6
    NEG = 7
    XOR_SIGN = 8
    SHIFT = 9
    SELECT = 10
    LUT_READ = 11
    SCALE_CONST = 12


NUM_KINDS = len(OpKind)
MEMORY_KEYS = ("reads", "writes")


class WeightTableError(ValueError):
    pass


@dataclass(frozen=True)
class OpWeightTable:
    weights: dict

    def __post_init__(self):
        w = {}
        for k, v in dict(self.weights).items():
            kind = k if isinstance(k, OpKind) else _kind(k)
            w[kind] = Fraction(v)
        missing = [k.name for k in OpKind if k not in w]
        if missing:
            raise WeightTableError(f"weight table lacks {', '.join(missing)}")
        if w[OpKind.ADD8] != 1:
            raise WeightTableError("ADD8 is the normalization anchor and must weigh exactly 1")
        bad = [k.name for k, v in w.items() if v <= 0]
        if bad:
            raise WeightTableError(f"weights must be positive: {', '.join(bad)}")
        object.__setattr__(self, "weights", w)

    def __getitem__(self, kind: OpKind) -> Fraction:
        return self.weights[kind]

    def as_array(self) -> np.ndarray:
        return np.array([float(self.weights[k]) for k in OpKind])

    def to_json(self) -> str:
        return json.dumps({k.name: str(self.weights[k]) for k in OpKind}, indent=2) + "\n"

    @classmethod
    def from_mapping(cls, mapping) -> "OpWeightTable":
        return cls({_kind(k): v for k, v in mapping.items()})

    @classmethod
    def load(cls, path) -> "OpWeightTable":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise WeightTableError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
        if not isinstance(raw, dict):
            raise WeightTableError(f"{path}: expected a JSON object of kind -> weight")
        return cls.from_mapping(raw)

    @classmethod
    def anchor(cls) -> "OpWeightTable":
        """Every kind weighs one 8-bit addition."""
        return cls({k: 1 for k in OpKind})


def _kind(name) -> OpKind:
    try:
        return OpKind[str(name).upper()]
    except KeyError:
        raise WeightTableError(f"unknown operation kind {name!r}") from None


def default_weights() -> OpWeightTable:
    return OpWeightTable.load(data_path("weights_default.json"))


@dataclass
class OpLedger:
    counts: dict = field(default_factory=dict)
    memory: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = {OpKind(k) if not isinstance(k, str) else OpKind[k]: int(v) for k, v in self.counts.items() if v}
        self.memory = {k: int(v) for k, v in self.memory.items() if v}

    @classmethod
    def from_arrays(cls, counts, memory=None, **labels) -> "OpLedger":
        c = {OpKind(i): int(v) for i, v in enumerate(np.asarray(counts)) if v}
        m = {} if memory is None else {k: int(v) for k, v in zip(MEMORY_KEYS, memory)}
        return cls(c, m, dict(labels))

    def count(self, kind: OpKind) -> int:
        return self.counts.get(kind, 0)

    def charge(self, kind: OpKind, n: int = 1) -> None:
        if n:
            self.counts[kind] = self.counts.get(kind, 0) + int(n)

    def as_array(self) -> np.ndarray:
        return np.array([self.count(k) for k in OpKind], dtype=np.int64)

    def merge(self, other: "OpLedger") -> "OpLedger":
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        memory = dict(self.memory)
        for k, v in other.memory.items():
            memory[k] = memory.get(k, 0) + v
        labels = {k: v for k, v in self.labels.items() if other.labels.get(k) == v}
        return OpLedger(counts, memory, labels)

    __add__ = merge

    def scaled(self, n: int) -> "OpLedger":
        return OpLedger({k: v * n for k, v in self.counts.items()}, {k: v * n for k, v in self.memory.items()}, dict(self.labels))

    def same_counts(self, other: "OpLedger") -> bool:
        return self.counts == other.counts and self.memory == other.memory

    def total_ops(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {
            "counts": {k.name: v for k, v in sorted(self.counts.items())},
            "memory": dict(sorted(self.memory.items())),
            "labels": dict(self.labels),
        }


def merge_all(ledgers) -> OpLedger:
    out = OpLedger()
    first = True
    for led in ledgers:
        out = OpLedger(dict(led.counts), dict(led.memory), dict(led.labels)) if first else out.merge(led)
        first = False
    return out


def weigh(ledger: OpLedger, table: OpWeightTable | None = None) -> Fraction:
    table = table or default_weights()
    return sum((Fraction(n) * table[k] for k, n in ledger.counts.items()), Fraction(0))


def ops_per_info_bit(ledger: OpLedger, K: int, table: OpWeightTable | None = None) -> float:
    if K <= 0:
        raise ValueError("K must be positive")
    return float(weigh(ledger, table) / K)


@dataclass(frozen=True)
class NormalizedComplexity:
    ops_per_info_bit: float

    def gops_at(self, throughput_mbps: float) -> float:
        return gops(self, throughput_mbps)


def gops(complexity, throughput_mbps: float) -> float:
    """Giga-operations per second: ops/bit x Mbit/s x 1e6 / 1e9."""
    ops = complexity.ops_per_info_bit if isinstance(complexity, NormalizedComplexity) else float(complexity)
    return ops * throughput_mbps * 1e6 / 1e9
