"""Convolutional codes (feed-forward or recursive systematic) and their trellis."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from decbench.codes.puncture import PuncturePattern


def octal_taps(g_octal: int, constraint_length: int) -> np.ndarray:
    """Tap vector of an octal-written generator; index 0 is the current input."""
    g = int(str(g_octal), 8)
    if g >> constraint_length:
        raise ValueError(f"generator {g_octal} does not fit constraint length {constraint_length}")
    return np.array([(g >> (constraint_length - 1 - d)) & 1 for d in range(constraint_length)], dtype=np.uint8)


@dataclass(frozen=True)
class Trellis:
    """State s holds the last m inputs, most recent in the MSB."""

    num_states: int
    next_state: np.ndarray  # [state, input] -> state
    output_bits: np.ndarray  # [state, input, n] -> 0/1
    labels: np.ndarray  # [state, input] -> sum_j c_j 2^j

    def predecessors(self, state: int) -> list[tuple[int, int]]:
        return [(s, u) for s in range(self.num_states) for u in (0, 1) if self.next_state[s, u] == state]


@dataclass(frozen=True)
class ConvCode:
    constraint_length: int
    generators: tuple[int, ...]
    puncture: PuncturePattern | None = None
    feedback: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))
        if self.constraint_length < 2:
            raise ValueError("constraint_length must be at least 2")
        if len(self.generators) < 2:
            raise ValueError("a convolutional code needs at least 2 generators")
        for g in self.generators:
            octal_taps(g, self.constraint_length)
        if self.feedback is not None:
            if self.generators[0] != self.feedback:
                raise ValueError("a recursive code lists its feedback polynomial first")
            if not octal_taps(self.feedback, self.constraint_length)[0]:
                raise ValueError("feedback polynomial must tap the current input")
        if self.puncture is not None and self.puncture.streams != self.n:
            raise ValueError("puncture mask must have one row per generator")

    @property
    def recursive(self) -> bool:
        return self.feedback is not None

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def memory(self) -> int:
        return self.constraint_length - 1

    @property
    def num_states(self) -> int:
        return 1 << self.memory

    @property
    def rate_base(self) -> Fraction:
        return Fraction(1, self.n)

    @property
    def rate(self) -> Fraction:
        if self.puncture is None:
            return self.rate_base
        return self.puncture.achieved_rate(self.rate_base)

    def generator_ints(self) -> list[int]:
        return [int(str(g), 8) for g in self.generators]

    def mother_length(self, K: int) -> int:
        return (K + self.memory) * self.n

    def transmitted_length(self, K: int) -> int:
        L = self.mother_length(K)
        return L if self.puncture is None else self.puncture.punctured_length(L)

    def exact_rate(self, K: int) -> Fraction:
        return Fraction(K, self.transmitted_length(K))

    def feedback_bit(self, state: int) -> int:
        """Input that drives the recursive register to zero from ``state`` (termination)."""
        if self.feedback is None:
            return 0
        fb = int(str(self.feedback), 8) & (self.num_states - 1)
        return bin(state & fb).count("1") & 1

    @cached_property
    def trellis(self) -> Trellis:
        """For a recursive code, output 0 is systematic and output j >= 1 uses generator j."""
        m, S, n = self.memory, self.num_states, self.n
        gens = self.generator_ints()
        nxt = np.zeros((S, 2), dtype=np.int32)
        out = np.zeros((S, 2, n), dtype=np.uint8)
        for s in range(S):
            for u in (0, 1):
                a = u ^ self.feedback_bit(s)
                r = (a << m) | s
                nxt[s, u] = r >> 1
                for j, g in enumerate(gens):
                    if self.recursive and j == 0:
                        out[s, u, j] = u
                    else:
                        out[s, u, j] = bin(r & g).count("1") & 1
        labels = (out.astype(np.int32) << np.arange(n, dtype=np.int32)).sum(axis=2).astype(np.int32)
        return Trellis(S, nxt, out, labels)


def conv_encode(bits, code: ConvCode, punctured: bool = False) -> np.ndarray:
    """Zero-terminated encoding; output length (K + m) * n unless ``punctured``."""
    from decbench.codes.puncture import puncture

    if code.recursive:
        raise ValueError("conv_encode handles feed-forward codes; use the trellis for recursive ones")
    u = np.concatenate([np.asarray(bits, dtype=np.uint8).reshape(-1), np.zeros(code.memory, dtype=np.uint8)])
    taps = np.stack([octal_taps(g, code.constraint_length) for g in code.generators])
    out = np.empty((u.size, code.n), dtype=np.uint8)
    for j in range(code.n):
        out[:, j] = np.convolve(u, taps[j])[: u.size] & 1
    flat = out.reshape(-1)
    if punctured and code.puncture is not None:
        flat = puncture(flat, code.puncture)
    return flat


CC_133_171 = ConvCode(7, (133, 171), name="cc-k7-133-171")
CC_5_7 = ConvCode(3, (5, 7), name="cc-k3-5-7")
CC_PUNCTURE = {
    Fraction(1, 2): None,
    Fraction(2, 3): PuncturePattern([[1, 1], [1, 0]]),
    Fraction(3, 4): PuncturePattern([[1, 1, 0], [1, 0, 1]]),
}


def reference_conv_code(rate=Fraction(1, 2)) -> ConvCode:
    rate = Fraction(rate)
    if rate not in CC_PUNCTURE:
        raise ValueError(f"no puncture pattern for rate {rate}")
    name = f"cc-k7-133-171-r{rate.numerator}{rate.denominator}"
    return ConvCode(7, (133, 171), CC_PUNCTURE[rate], name=name)
