"""Periodic puncturing of interleaved mother-code streams.

A coded stream is laid out time-major: position ``t * n + j`` holds output ``j``
of step ``t``.  ``keep_mask[j, t % period]`` selects the survivors, so a
trailing partial period is punctured by the prefix of the mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True, eq=False)
class PuncturePattern:
    keep_mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.keep_mask, dtype=np.uint8, copy=True)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("keep_mask must be a non-empty 2-D array (streams x period)")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("keep_mask entries must be 0 or 1")
        if m.sum() == 0:
            raise ValueError("a puncture pattern must keep at least one bit per period")
        m.setflags(write=False)
        object.__setattr__(self, "keep_mask", m)

    def __eq__(self, other):
        return isinstance(other, PuncturePattern) and np.array_equal(self.keep_mask, other.keep_mask)

    def __hash__(self):
        return hash((self.keep_mask.shape, self.keep_mask.tobytes()))

    @property
    def streams(self) -> int:
        return self.keep_mask.shape[0]

    @property
    def period(self) -> int:
        return self.keep_mask.shape[1]

    @property
    def kept_count(self) -> int:
        return int(self.keep_mask.sum())

    def achieved_rate(self, rate_base) -> Fraction:
        return Fraction(rate_base) * self.streams * self.period / self.kept_count

    def positions(self, length: int) -> np.ndarray:
        """Boolean keep flag for each position of a stream of ``length`` symbols."""
        p = np.arange(length)
        return self.keep_mask[p % self.streams, (p // self.streams) % self.period].astype(bool)

    def punctured_length(self, length: int) -> int:
        return int(self.positions(length).sum())

    def to_list(self) -> list[list[int]]:
        return self.keep_mask.tolist()

    @classmethod
    def keep_all(cls, streams: int) -> "PuncturePattern":
        return cls(np.ones((streams, 1), dtype=np.uint8))


def puncture(bits, p: PuncturePattern) -> np.ndarray:
    bits = np.asarray(bits)
    return bits[p.positions(bits.size)]


def depuncture(llrs, p: PuncturePattern, length: int) -> np.ndarray:
    """Re-insert neutral zeros at dropped positions of a ``length``-symbol stream."""
    llrs = np.asarray(llrs)
    keep = p.positions(length)
    if llrs.size != keep.sum():
        raise ValueError(f"expected {int(keep.sum())} kept symbols, got {llrs.size}")
    out = np.zeros(length, dtype=llrs.dtype)
    out[keep] = llrs
    return out
