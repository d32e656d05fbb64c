"""Saturating fixed-point LLR format.

LLRs travel between every block of the receiver as signed integers counted in
LSBs.  A format has ``total_bits`` (sign included) and ``frac_bits``; the
representable range is symmetric, ``[-(2**(w-1) - 1), 2**(w-1) - 1]``, so
negation never overflows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LlrFormat:
    total_bits: int = 6
    frac_bits: int = 2

    def __post_init__(self):
        if self.total_bits < 2:
            raise ValueError("an LLR format needs at least 2 bits")
        if not 0 <= self.frac_bits < self.total_bits:
            raise ValueError("frac_bits must lie in [0, total_bits)")

    @property
    def max_code(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def max_value(self) -> float:
        return self.max_code * self.lsb

    def saturate(self, codes):
        return np.clip(codes, -self.max_code, self.max_code)

    def widened(self, extra_bits: int) -> "LlrFormat":
        return LlrFormat(self.total_bits + extra_bits, self.frac_bits)

    def describe(self) -> str:
        return f"Q{self.total_bits}.{self.frac_bits}"


DEFAULT_FORMAT = LlrFormat()


def round_half_away(x):
    """Round to the nearest integer, ties away from zero (odd-symmetric)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(x, fmt: LlrFormat = DEFAULT_FORMAT) -> np.ndarray:
    """Map real LLRs to saturated integer codes (units of one LSB)."""
    scaled = round_half_away(np.asarray(x, dtype=np.float64) * (1 << fmt.frac_bits))
    return fmt.saturate(scaled).astype(np.int32)


def dequantize(codes, fmt: LlrFormat = DEFAULT_FORMAT) -> np.ndarray:
    return np.asarray(codes, dtype=np.float64) * fmt.lsb


def sat_add(a, b, fmt: LlrFormat = DEFAULT_FORMAT):
    """Saturating addition of integer codes."""
    return fmt.saturate(np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64))


def sat_sub(a, b, fmt: LlrFormat = DEFAULT_FORMAT):
    return fmt.saturate(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64))


def scale_factor_q8(alpha: float) -> int:
    """Express a scaling constant in Q0.8, the precision the kernels multiply with."""
    q = int(round(alpha * 256))
    if abs(q / 256 - alpha) > 1e-12:
        raise ValueError(f"scaling factor {alpha} is not representable in Q0.8")
    return q


def scale_codes(codes, alpha_q8: int):
    """Multiply integer codes by ``alpha_q8 / 256`` with round-half-away."""
    c = np.asarray(codes, dtype=np.int64)
    mag = (np.abs(c) * alpha_q8 + 128) >> 8
    return np.where(c < 0, -mag, mag)
