"""Bit-to-symbol mapping, AWGN and quantized channel LLRs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from decbench.fixedpoint import DEFAULT_FORMAT, LlrFormat, quantize

MODULATIONS = {"BPSK": 1, "16QAM": 4}

_QAM_LEVELS = np.array([3.0, 1.0, -3.0, -1.0])  # Gray pair (b_sign, b_mag) -> level
_QAM_SCALE = 1.0 / math.sqrt(10.0)


@dataclass(frozen=True)
class ChannelConfig:
    modulation: str = "BPSK"
    ebno_db: float = 0.0
    rate: Fraction = Fraction(1, 2)
    seed: int = 0

    def __post_init__(self):
        if self.modulation not in MODULATIONS:
            raise ValueError(f"unknown modulation {self.modulation!r}")
        object.__setattr__(self, "rate", Fraction(self.rate))
        if not 0 < self.rate <= 1:
            raise ValueError("code rate must lie in (0, 1]")

    @property
    def bits_per_symbol(self) -> int:
        return MODULATIONS[self.modulation]

    @property
    def sigma(self) -> float:
        return ebno_to_sigma(self.ebno_db, self.rate, self.bits_per_symbol)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rate"] = str(self.rate)
        return d


def ebno_to_sigma(ebno_db: float, rate, bits_per_symbol: int = 1) -> float:
    """Per-dimension noise std for a unit-energy constellation."""
    if math.isinf(ebno_db) and ebno_db > 0:
        return 0.0
    ebno = 10.0 ** (ebno_db / 10.0)
    return math.sqrt(1.0 / (2.0 * float(rate) * bits_per_symbol * ebno))


def frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    """Independent generator for one frame: a pure function of (seed, index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), frame_index])))


def bpsk_map(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def awgn(symbols, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if not sigma > 0:
        raise ValueError(f"noise std must be positive, got {sigma}")
    symbols = np.asarray(symbols)
    if np.iscomplexobj(symbols):
        noise = rng.standard_normal(symbols.shape) + 1j * rng.standard_normal(symbols.shape)
    else:
        noise = rng.standard_normal(symbols.shape)
    return symbols + sigma * noise


def transmit(symbols, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """AWGN with a noiseless bypass for sigma == 0 (Eb/N0 = +inf)."""
    if sigma == 0:
        return np.array(symbols, copy=True)
    return awgn(symbols, sigma, rng)


def channel_llr(samples, sigma: float) -> np.ndarray:
    """BPSK LLR ``2 y / sigma^2``; the noiseless limit returns signed infinities."""
    y = np.asarray(samples, dtype=np.float64)
    if sigma == 0:
        return np.where(y > 0, np.inf, np.where(y < 0, -np.inf, 0.0))
    return 2.0 * y / (sigma * sigma)


def quantized_llr(samples, sigma: float, fmt: LlrFormat = DEFAULT_FORMAT) -> np.ndarray:
    llr = channel_llr(samples, sigma)
    llr = np.clip(llr, -2 * fmt.max_value, 2 * fmt.max_value)
    return quantize(llr, fmt)


def qam16_points() -> np.ndarray:
    """All 16 constellation points indexed by the nibble value b0 b1 b2 b3 (b0 = MSB)."""
    nib = np.arange(16)
    bits = (nib[:, None] >> np.arange(3, -1, -1)) & 1
    return qam16_map(bits.reshape(-1))


def qam16_map(bits) -> np.ndarray:
    """Gray 16-QAM, unit average energy; bits (b0, b1) drive I, (b2, b3) drive Q."""
    b = np.asarray(bits, dtype=np.int64).reshape(-1, 4)
    i = _QAM_LEVELS[2 * b[:, 0] + b[:, 1]]
    q = _QAM_LEVELS[2 * b[:, 2] + b[:, 3]]
    return (i + 1j * q) * _QAM_SCALE


def qam16_demap(samples, sigma: float) -> np.ndarray:
    """Max-log per-bit LLRs, positive favouring bit 0; returns 4 LLRs per symbol."""
    y = np.asarray(samples, dtype=np.complex128).reshape(-1)
    pts = qam16_points()
    d2 = np.abs(y[:, None] - pts[None, :]) ** 2
    nib = np.arange(16)
    out = np.empty((y.size, 4))
    denom = 2.0 * sigma * sigma if sigma > 0 else 1.0
    for k in range(4):
        one = ((nib >> (3 - k)) & 1).astype(bool)
        out[:, k] = (d2[:, one].min(axis=1) - d2[:, ~one].min(axis=1)) / denom
    return out.reshape(-1)


def q_function(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def uncoded_bpsk_ber(ebno_db: float) -> float:
    return q_function(math.sqrt(2.0 * 10.0 ** (ebno_db / 10.0)))
