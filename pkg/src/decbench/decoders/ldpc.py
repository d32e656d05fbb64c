"""Flooding QC-LDPC decoder with scaled Min-Sum and lambda-3-Min check nodes.

Messages are 6-bit sign-magnitude codes.  Variable nodes accumulate in a
wider register (two extra bits) and saturate after the sum.  The kernel
charges datapath operations per node as it runs, so a ledger is a pure
function of the code structure and the number of iterations executed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit

from decbench.codes.qc import QcLdpcCode, SparseParityMatrix
from decbench.fixedpoint import DEFAULT_FORMAT, LlrFormat, quantize, dequantize, scale_factor_q8
from decbench.opmeter import NUM_KINDS, OpKind, OpLedger

# correction log(1 + exp(-x)) in LSBs of a 2-fractional-bit format, indexed by x in LSBs
LAMBDA_LUT = np.array([3, 2, 2, 2, 1, 1, 1, 1], dtype=np.int64)

_ADD8, _SUB8, _CMP, _MIN2, _ABS = int(OpKind.ADD8), int(OpKind.SUB8), int(OpKind.CMP), int(OpKind.MIN2), int(OpKind.ABS)
_XOR, _SELECT, _LUT, _SCALE = int(OpKind.XOR_SIGN), int(OpKind.SELECT), int(OpKind.LUT_READ), int(OpKind.SCALE_CONST)


class Kernel(str, Enum):
    MIN_SUM = "minsum"
    LAMBDA3 = "lambda3"


class DegenerateRow(ValueError):
    pass


@dataclass(frozen=True)
class CheckNodeKernel:
    variant: Kernel = Kernel.MIN_SUM
    alpha: float = 0.75
    lut: tuple = tuple(LAMBDA_LUT.tolist())

    def __post_init__(self):
        object.__setattr__(self, "variant", Kernel(self.variant))
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        scale_factor_q8(self.alpha)
        lut = tuple(int(x) for x in self.lut)
        if any(b > a for a, b in zip(lut, lut[1:])) or any(x < 0 for x in lut):
            raise ValueError("correction LUT must be nonnegative and nonincreasing")
        object.__setattr__(self, "lut", lut)

    @property
    def alpha_q8(self) -> int:
        return scale_factor_q8(self.alpha)

    def describe(self) -> str:
        if self.variant is Kernel.MIN_SUM:
            return f"minsum(alpha={self.alpha})"
        return "lambda3"


MIN_SUM = CheckNodeKernel(Kernel.MIN_SUM)
LAMBDA3 = CheckNodeKernel(Kernel.LAMBDA3)


def ceil_log2(d: int) -> int:
    return max(0, math.ceil(math.log2(d))) if d > 1 else 0


# ---------------------------------------------------------------- node kernels


@njit(cache=True, nogil=True)
def _clog2(d):
    r = 0
    while (1 << r) < d:
        r += 1
    return r


@njit(cache=True, nogil=True)
def _lut(lut, x):
    if x < lut.size:
        return lut[x]
    return 0


@njit(cache=True, nogil=True)
def _boxplus_mag(a, b, lut):
    m = a if a < b else b
    d = a - b if a >= b else b - a
    r = m + _lut(lut, a + b) - _lut(lut, d)
    return r if r > 0 else 0


@njit(cache=True, nogil=True)
def _cn_minsum(vin, vout, d, alpha_q8, counts):
    m1 = 1 << 30
    m2 = 1 << 30
    i1 = -1
    neg = 0
    for k in range(d):
        v = vin[k]
        a = -v if v < 0 else v
        if v < 0:
            neg ^= 1
        if a < m1:
            m2 = m1
            m1 = a
            i1 = k
        elif a < m2:
            m2 = a
    s1 = (m1 * alpha_q8 + 128) >> 8
    s2 = (m2 * alpha_q8 + 128) >> 8
    for k in range(d):
        mag = s2 if k == i1 else s1
        sgn = neg ^ (1 if vin[k] < 0 else 0)
        vout[k] = -mag if sgn else mag
    counts[_CMP] += d + _clog2(d) - 2
    counts[_SELECT] += d
    counts[_XOR] += 2 * ((d + 7) // 8)
    counts[_SCALE] += 2


@njit(cache=True, nogil=True)
def _cn_lambda3(vin, vout, d, lut, counts):
    m1 = 1 << 30
    m2 = 1 << 30
    m3 = 1 << 30
    i1 = -1
    i2 = -1
    i3 = -1
    neg = 0
    for k in range(d):
        v = vin[k]
        a = -v if v < 0 else v
        if v < 0:
            neg ^= 1
        if a < m1:
            m3 = m2
            i3 = i2
            m2 = m1
            i2 = i1
            m1 = a
            i1 = k
        elif a < m2:
            m3 = m2
            i3 = i2
            m2 = a
            i2 = k
        elif a < m3:
            m3 = a
            i3 = k
    nbox = 0
    for k in range(d):
        if d == 2:
            mag = m2 if k == i1 else m1
        elif k == i1:
            mag = _boxplus_mag(m2, m3, lut)
            nbox += 1
        elif k == i2:
            mag = _boxplus_mag(m1, m3, lut)
            nbox += 1
        elif k == i3:
            mag = _boxplus_mag(m1, m2, lut)
            nbox += 1
        else:
            mag = _boxplus_mag(_boxplus_mag(m1, m2, lut), m3, lut)
            nbox += 2
        sgn = neg ^ (1 if vin[k] < 0 else 0)
        vout[k] = -mag if sgn else mag
    cmp_ops = d + 2 * _clog2(d) - 3
    counts[_CMP] += cmp_ops if cmp_ops > 0 else 0
    counts[_MIN2] += nbox
    counts[_ADD8] += 2 * nbox
    counts[_SUB8] += 2 * nbox
    counts[_ABS] += nbox
    counts[_LUT] += 2 * nbox
    counts[_XOR] += 2 * ((d + 7) // 8)


@njit(cache=True, nogil=True)
def _check_node(vin, vout, d, kernel, alpha_q8, lut, counts):
    if kernel == 0:
        _cn_minsum(vin, vout, d, alpha_q8, counts)
    else:
        _cn_lambda3(vin, vout, d, lut, counts)


# ---------------------------------------------------------------- decoder


@njit(cache=True, nogil=True)
def _syndrome_ok(hard, row_ptr, col_idx):
    m = row_ptr.size - 1
    for r in range(m):
        s = 0
        for e in range(row_ptr[r], row_ptr[r + 1]):
            s ^= hard[col_idx[e]]
        if s:
            return False
    return True


@njit(cache=True, nogil=True)
def _info_errors(hard, ref, k_info):
    n = 0
    for i in range(k_info):
        if hard[i] != ref[i]:
            n += 1
    return n


@njit(cache=True, nogil=True)
def _decode_batch(
    llrs, row_ptr, col_idx, col_ptr, col_edges, kernel, alpha_q8, lut, msg_max, acc_max,
    max_iters, early_stop, refs, k_info, hard_out, iters_out, err_out, counts, memory,
):
    F, N = llrs.shape
    m = row_ptr.size - 1
    E = col_idx.size
    v2c = np.empty(E, dtype=np.int64)
    c2v = np.zeros(E, dtype=np.int64)
    dmax = 0
    for r in range(m):
        d = row_ptr[r + 1] - row_ptr[r]
        if d > dmax:
            dmax = d
    vin = np.empty(dmax, dtype=np.int64)
    vout = np.empty(dmax, dtype=np.int64)
    hard = np.empty(N, dtype=np.uint8)
    track = refs.shape[0] == F
    for f in range(F):
        for v in range(N):
            hard[v] = 1 if llrs[f, v] < 0 else 0
        for e in range(E):
            v2c[e] = llrs[f, col_idx[e]]
        used = 0
        if track:
            err_out[f, 0] = _info_errors(hard, refs[f], k_info)
        done = False  # the syndrome is checked after each iteration, never on the channel decision
        it = 0
        while it < max_iters and not done:
            for r in range(m):
                s = row_ptr[r]
                d = row_ptr[r + 1] - s
                for k in range(d):
                    vin[k] = v2c[s + k]
                _check_node(vin, vout, d, kernel, alpha_q8, lut, counts)
                for k in range(d):
                    c2v[s + k] = vout[k]
            memory[0] += E
            memory[1] += E
            for v in range(N):
                s = col_ptr[v]
                dv = col_ptr[v + 1] - s
                tot = llrs[f, v]
                for k in range(dv):
                    tot += c2v[col_edges[s + k]]
                if tot > acc_max:
                    tot = acc_max
                elif tot < -acc_max:
                    tot = -acc_max
                for k in range(dv):
                    e = col_edges[s + k]
                    x = tot - c2v[e]
                    if x > msg_max:
                        x = msg_max
                    elif x < -msg_max:
                        x = -msg_max
                    v2c[e] = x
                hard[v] = 1 if tot < 0 else 0
                counts[_ADD8] += dv
                counts[_SUB8] += dv
            memory[0] += E + N
            memory[1] += E
            it += 1
            used = it
            if track:
                err_out[f, it] = _info_errors(hard, refs[f], k_info)
            if early_stop and _syndrome_ok(hard, row_ptr, col_idx):
                done = True
        if track:
            for j in range(used + 1, max_iters + 1):
                err_out[f, j] = err_out[f, used]
        iters_out[f] = used
        for v in range(N):
            hard_out[f, v] = hard[v]


@dataclass
class LdpcResult:
    bits: np.ndarray  # (F, N) hard decisions
    iterations_used: np.ndarray  # (F,)
    ledger: OpLedger
    info_errors: np.ndarray | None = None  # (F, max_iters + 1) info-bit errors after each iteration

    @property
    def info_bits(self) -> np.ndarray:
        return self.bits


@dataclass
class LdpcDecoder:
    """Decoder bound to one parity-check matrix; cheap to build and safe to use from one thread."""

    H: SparseParityMatrix
    kernel: CheckNodeKernel = MIN_SUM
    fmt: LlrFormat = DEFAULT_FORMAT
    acc_extra_bits: int = 2
    k_info: int | None = None
    _arrays: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if np.any(self.H.row_degrees < 2):
            r = int(np.flatnonzero(self.H.row_degrees < 2)[0])
            raise DegenerateRow(f"check {r} has degree {int(self.H.row_degrees[r])}")
        cp, ce = self.H.column_view
        self._arrays = (self.H.row_ptr, self.H.col_idx, cp, ce)
        if self.k_info is None:
            self.k_info = self.H.n - self.H.m

    @classmethod
    def for_code(cls, code: QcLdpcCode, kernel: CheckNodeKernel = MIN_SUM, **kw) -> "LdpcDecoder":
        return cls(code.H, kernel, k_info=code.K, **kw)

    def decode(self, llrs, max_iters: int, early_stop: bool = True, reference=None) -> LdpcResult:
        """Decode integer LLR codes; ``llrs`` is (N,) or (F, N).  ``reference`` enables per-iteration error counts."""
        if max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        x = np.asarray(llrs)
        single = x.ndim == 1
        x = np.atleast_2d(x).astype(np.int64)
        if x.shape[1] != self.H.n:
            raise ValueError(f"expected {self.H.n} LLRs per frame, got {x.shape[1]}")
        x = np.clip(x, -self.fmt.max_code, self.fmt.max_code)
        F = x.shape[0]
        if reference is not None:
            refs = np.atleast_2d(np.asarray(reference, dtype=np.uint8))
            if refs.shape != (F, self.k_info) and refs.shape[1] >= self.k_info:
                refs = refs[:, : self.k_info]
            if refs.shape[0] != F:
                raise ValueError("one reference per frame required")
            refs = np.ascontiguousarray(refs[:, : self.k_info])
            err = np.zeros((F, max_iters + 1), dtype=np.int64)
        else:
            refs = np.zeros((0, 1), dtype=np.uint8)
            err = np.zeros((1, 1), dtype=np.int64)
        hard = np.empty((F, self.H.n), dtype=np.uint8)
        iters = np.empty(F, dtype=np.int64)
        counts = np.zeros(NUM_KINDS, dtype=np.int64)
        memory = np.zeros(2, dtype=np.int64)
        kid = 0 if self.kernel.variant is Kernel.MIN_SUM else 1
        _decode_batch(
            x, *self._arrays, kid, self.kernel.alpha_q8, np.asarray(self.kernel.lut, dtype=np.int64),
            self.fmt.max_code, self.fmt.widened(self.acc_extra_bits).max_code,
            max_iters, bool(early_stop), refs, self.k_info, hard, iters, err, counts, memory,
        )
        ledger = OpLedger.from_arrays(counts, memory, module="ldpc", kernel=self.kernel.describe())
        res = LdpcResult(hard, iters, ledger, err if reference is not None else None)
        if single:
            res.bits = hard[0]
        return res


def ldpc_decode(llrs, code, kernel: CheckNodeKernel = MIN_SUM, max_iters: int = 5, early_stop: bool = True, reference=None):
    H = code.H if isinstance(code, QcLdpcCode) else code
    k = code.K if isinstance(code, QcLdpcCode) else None
    return LdpcDecoder(H, kernel, k_info=k).decode(llrs, max_iters, early_stop, reference)


# ---------------------------------------------------------------- single check node API


def _run_check(inputs, kernel: CheckNodeKernel, fmt: LlrFormat):
    x = np.asarray(inputs)
    real = not np.issubdtype(x.dtype, np.integer)
    codes = quantize(x, fmt).astype(np.int64) if real else np.clip(x.astype(np.int64), -fmt.max_code, fmt.max_code)
    d = codes.size
    if d < 2:
        raise DegenerateRow(f"check degree {d} < 2")
    out = np.empty(d, dtype=np.int64)
    counts = np.zeros(NUM_KINDS, dtype=np.int64)
    kid = 0 if kernel.variant is Kernel.MIN_SUM else 1
    _check_node(codes, out, d, kid, kernel.alpha_q8, np.asarray(kernel.lut, dtype=np.int64), counts)
    return (dequantize(out, fmt) if real else out), OpLedger.from_arrays(counts)


def check_node_min_sum(inputs, alpha: float = 0.75, fmt: LlrFormat = DEFAULT_FORMAT):
    """Scaled Min-Sum outputs; float inputs are quantized first and outputs returned as reals."""
    return _run_check(inputs, CheckNodeKernel(Kernel.MIN_SUM, alpha), fmt)[0]


def check_node_lambda3(inputs, lut=None, fmt: LlrFormat = DEFAULT_FORMAT):
    k = LAMBDA3 if lut is None else CheckNodeKernel(Kernel.LAMBDA3, lut=tuple(lut))
    return _run_check(inputs, k, fmt)[0]


def check_node_ledger(degree: int, kernel: CheckNodeKernel) -> OpLedger:
    return _run_check(np.arange(1, degree + 1, dtype=np.int64), kernel, DEFAULT_FORMAT)[1]


def boxplus_mag(a: int, b: int, lut=LAMBDA_LUT) -> int:
    return int(_boxplus_mag(int(a), int(b), np.asarray(lut, dtype=np.int64)))
