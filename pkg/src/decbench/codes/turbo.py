"""LTE-style parallel concatenated code: two 8-state RSC encoders and a QPP interleaver."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from decbench.codes.conv import ConvCode
from decbench.codes.puncture import PuncturePattern, puncture
from decbench.codes.qpp import qpp_coefficients, qpp_permutation

LTE_RSC = ConvCode(4, (13, 15), feedback=13, name="rsc-13-15")
TAIL_BITS = 12

# rows: systematic, parity 1, parity 2; systematic bits are never dropped
TURBO_PUNCTURE = {
    Fraction(1, 3): None,
    Fraction(1, 2): PuncturePattern([[1, 1], [1, 0], [0, 1]]),
    Fraction(2, 3): PuncturePattern([[1] * 4, [1, 0, 0, 0], [0, 0, 1, 0]]),
    Fraction(3, 4): PuncturePattern([[1] * 6, [1, 0, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0]]),
    Fraction(5, 6): PuncturePattern([[1] * 10, [1] + [0] * 9, [0] * 5 + [1] + [0] * 4]),
    Fraction(9, 10): PuncturePattern([[1] * 18, [1] + [0] * 17, [0] * 9 + [1] + [0] * 8]),
}


@dataclass(frozen=True)
class TurboCode:
    K: int
    qpp: tuple[int, int] | None = None
    constituent: ConvCode = LTE_RSC
    puncture: PuncturePattern | None = None
    tail_bits: int = TAIL_BITS
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.qpp is None:
            object.__setattr__(self, "qpp", qpp_coefficients(self.K))
        if not self.constituent.recursive or self.constituent.num_states != 8:
            raise ValueError("turbo constituent must be an 8-state recursive systematic code")
        if self.tail_bits != 2 * 2 * self.constituent.memory:
            raise ValueError("tail_bits must equal 2 encoders x memory x (systematic, parity)")
        if self.puncture is not None:
            if self.puncture.streams != 3:
                raise ValueError("turbo puncture masks have 3 rows (sys, p1, p2)")
            if not self.puncture.keep_mask[0].all():
                raise ValueError("turbo puncture masks must keep every systematic bit")

    @cached_property
    def permutation(self) -> np.ndarray:
        return qpp_permutation(self.K, *self.qpp)

    @property
    def mother_rate(self) -> Fraction:
        return Fraction(1, 3)

    @property
    def mother_length(self) -> int:
        return 3 * self.K + self.tail_bits

    @property
    def transmitted_length(self) -> int:
        body = 3 * self.K
        if self.puncture is not None:
            body = self.puncture.punctured_length(body)
        return body + self.tail_bits

    @property
    def rate(self) -> Fraction:
        """Nominal rate of the puncture pattern, tails ignored."""
        if self.puncture is None:
            return self.mother_rate
        return self.puncture.achieved_rate(self.mother_rate)

    @property
    def exact_rate(self) -> Fraction:
        return Fraction(self.K, self.transmitted_length)


def lte_turbo_code(K: int, rate=Fraction(1, 3)) -> TurboCode:
    rate = Fraction(rate)
    if rate not in TURBO_PUNCTURE:
        raise ValueError(f"no turbo puncture pattern for rate {rate}")
    return TurboCode(K, puncture=TURBO_PUNCTURE[rate], name=f"lte-turbo-K{K}-r{rate.numerator}{rate.denominator}")


def rsc_encode(bits, code: ConvCode = LTE_RSC) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parity stream plus the terminating (systematic, parity) pairs."""
    t = code.trellis
    u = np.asarray(bits, dtype=np.uint8)
    par = np.empty(u.size, dtype=np.uint8)
    s = 0
    for i, b in enumerate(u):
        par[i] = t.output_bits[s, b, 1]
        s = t.next_state[s, b]
    tail_x = np.empty(code.memory, dtype=np.uint8)
    tail_z = np.empty(code.memory, dtype=np.uint8)
    for i in range(code.memory):
        b = code.feedback_bit(s)
        tail_x[i] = b
        tail_z[i] = t.output_bits[s, b, 1]
        s = t.next_state[s, b]
    assert s == 0
    return par, tail_x, tail_z


def turbo_encode(bits, code: TurboCode):
    """Returns (systematic, parity1, parity2, tails) with tails in LTE order x z x z x z | x' z' ..."""
    u = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if u.size != code.K:
        raise ValueError(f"expected {code.K} bits, got {u.size}")
    p1, x1, z1 = rsc_encode(u, code.constituent)
    p2, x2, z2 = rsc_encode(u[code.permutation], code.constituent)
    tails = np.concatenate([np.stack([x1, z1], 1).reshape(-1), np.stack([x2, z2], 1).reshape(-1)])
    return u.copy(), p1, p2, tails


def turbo_multiplex(sys, p1, p2, tails, code: TurboCode) -> np.ndarray:
    """Time-major (sys, p1, p2) body, punctured, followed by the 12 tail bits."""
    body = np.stack([sys, p1, p2], axis=1).reshape(-1)
    if code.puncture is not None:
        body = puncture(body, code.puncture)
    return np.concatenate([body, tails])


def turbo_demultiplex(llrs, code: TurboCode):
    """Inverse of turbo_multiplex for soft values; punctured positions become exact zeros."""
    from decbench.codes.puncture import depuncture

    llrs = np.asarray(llrs)
    if llrs.size != code.transmitted_length:
        raise ValueError(f"expected {code.transmitted_length} values, got {llrs.size}")
    body, tails = llrs[: -code.tail_bits], llrs[-code.tail_bits :]
    if code.puncture is not None:
        body = depuncture(body, code.puncture, 3 * code.K)
    body = body.reshape(code.K, 3)
    return body[:, 0].copy(), body[:, 1].copy(), body[:, 2].copy(), tails.copy()
