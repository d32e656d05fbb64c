"""Soft-input Viterbi decoder for zero-terminated feed-forward codes, plus an exhaustive ML oracle."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from decbench.codes.conv import ConvCode, conv_encode
from decbench.codes.puncture import depuncture
from decbench.opmeter import NUM_KINDS, OpKind, OpLedger

_ADD8, _MAX2, _SELECT = int(OpKind.ADD8), int(OpKind.MAX2), int(OpKind.SELECT)


@njit(cache=True, nogil=True)
def _viterbi_batch(llrs, K, n, m, labels, out, metrics, counts, bm_adds, branch_adds):
    F = llrs.shape[0]
    S = 1 << m
    half = S >> 1
    T = K + m
    pm = np.empty(S, dtype=np.int64)
    nm = np.empty(S, dtype=np.int64)
    bm = np.empty(1 << n, dtype=np.int64)
    dec = np.empty((T, S), dtype=np.uint8)
    NEG = -(1 << 60)
    for f in range(F):
        for s in range(S):
            pm[s] = NEG
        pm[0] = 0
        for t in range(T):
            # branch metric of label c: -(sum of llrs where c_j = 1)
            for c in range(1 << n):
                v = 0
                for j in range(n):
                    if (c >> j) & 1:
                        v -= llrs[f, t * n + j]
                bm[c] = v
            for s2 in range(S):
                u = s2 // half
                p0 = 2 * (s2 % half)
                p1 = p0 + 1
                m0 = pm[p0] + bm[labels[p0, u]]
                m1 = pm[p1] + bm[labels[p1, u]]
                if m1 > m0:
                    nm[s2] = m1
                    dec[t, s2] = 1
                else:
                    nm[s2] = m0
                    dec[t, s2] = 0
            mx = nm[0]
            for s in range(1, S):
                if nm[s] > mx:
                    mx = nm[s]
            for s in range(S):
                pm[s] = nm[s] - mx if nm[s] > NEG // 2 else NEG
            metrics[f] += mx
        metrics[f] += pm[0]
        s = 0
        for t in range(T - 1, -1, -1):
            u = s // half
            if t < K:
                out[f, t] = u
            s = 2 * (s % half) + dec[t, s]
        counts[_ADD8] += T * (bm_adds + branch_adds)
        counts[_MAX2] += T * S
        counts[_SELECT] += T


@dataclass
class ViterbiResult:
    bits: np.ndarray
    metric: np.ndarray  # branch-metric sum of the survivor, -(sum of llrs where c = 1)
    ledger: OpLedger


def _prepare(llrs, code: ConvCode, K: int) -> np.ndarray:
    x = np.atleast_2d(np.asarray(llrs))
    L = code.mother_length(K)
    if x.shape[1] == L:
        return x.astype(np.int64)
    if code.puncture is not None and x.shape[1] == code.transmitted_length(K):
        return np.stack([depuncture(row, code.puncture, L) for row in x]).astype(np.int64)
    raise ValueError(f"LLR length {x.shape[1]} does not match a terminated codeword for K={K}")


def _charges(code: ConvCode) -> tuple[int, int]:
    n = code.n
    bm_adds = sum(max(0, bin(c).count("1") - 1) for c in range(1 << n))
    branch_adds = int(np.count_nonzero(code.trellis.labels))
    return bm_adds, branch_adds


def viterbi_decode(llrs, code: ConvCode, K: int | None = None) -> ViterbiResult:
    """Decode integer (or real) LLRs, (L,) or (F, L); positive LLR favours bit 0."""
    if code.recursive:
        raise ValueError("Viterbi decoder handles feed-forward codes")
    x = np.asarray(llrs)
    single = x.ndim == 1
    length = x.shape[-1]
    if K is None:
        K = length // code.n - code.memory
        if code.puncture is not None and code.mother_length(K) != length:
            K = _k_from_punctured(code, length)
    if not np.issubdtype(x.dtype, np.integer):
        raise TypeError("viterbi_decode expects integer LLR codes")
    xx = _prepare(x, code, K)
    F = xx.shape[0]
    out = np.empty((F, K), dtype=np.uint8)
    metrics = np.zeros(F, dtype=np.int64)
    counts = np.zeros(NUM_KINDS, dtype=np.int64)
    bm_adds, branch_adds = _charges(code)
    _viterbi_batch(xx, K, code.n, code.memory, code.trellis.labels.astype(np.int64), out, metrics, counts, bm_adds, branch_adds)
    ledger = OpLedger.from_arrays(counts, (F * xx.shape[1], F * K), module="viterbi", kernel=f"{code.num_states}-state")
    if single:
        return ViterbiResult(out[0], metrics[:1], ledger)
    return ViterbiResult(out, metrics, ledger)


def _k_from_punctured(code: ConvCode, length: int) -> int:
    K = max(1, length * code.rate.numerator // code.rate.denominator - code.memory - code.n)
    for k in range(max(1, K - 4 * code.n), K + 8 * code.n):
        if code.transmitted_length(k) == length:
            return k
    raise ValueError(f"no block length gives {length} punctured symbols")


def correlation_metric(llrs, codeword) -> int:
    """sum llr_i * (1 - 2 c_i), the quantity the decoder maximizes."""
    c = np.asarray(codeword, dtype=np.int64)
    return int(np.dot(np.asarray(llrs, dtype=np.int64), 1 - 2 * c))


@lru_cache(maxsize=16)
def _codebook(code: ConvCode, K: int) -> np.ndarray:
    msgs = ((np.arange(1 << K)[:, None] >> np.arange(K - 1, -1, -1)) & 1).astype(np.uint8)
    return msgs, np.stack([conv_encode(m, code) for m in msgs])


def ml_oracle_decode(llrs, code: ConvCode, K: int) -> np.ndarray:
    """Exhaustive ML over all 2^K messages; ties go to the lexicographically smallest message."""
    if K > 16:
        raise ValueError("the exhaustive oracle is limited to K <= 16")
    x = _prepare(llrs, code, K)[0]
    msgs, cws = _codebook(code, K)
    scores = (1 - 2 * cws.astype(np.int64)) @ x
    return msgs[int(np.argmax(scores))].copy()
