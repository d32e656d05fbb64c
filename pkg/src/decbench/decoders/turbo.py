"""Iterative Max-Log-MAP turbo decoder for the LTE code.

One SISO pass is a half-iteration.  Branch metrics are correlations,
``gamma(u, p) = -u * (Ls + La) - p * Lp``, so a larger metric is more likely and
0-labelled branches need no adder.  State metrics are saturated to the LLR
width plus headroom bits and max-normalised every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from decbench.codes.turbo import LTE_RSC, TurboCode, turbo_demultiplex
from decbench.fixedpoint import DEFAULT_FORMAT, LlrFormat, scale_factor_q8
from decbench.opmeter import NUM_KINDS, OpKind, OpLedger

_ADD8, _SUB8, _MAX2, _SCALE = int(OpKind.ADD8), int(OpKind.SUB8), int(OpKind.MAX2), int(OpKind.SCALE_CONST)


def _tables(code=LTE_RSC):
    t = code.trellis
    S = t.num_states
    nxt = t.next_state.astype(np.int64)
    par = t.output_bits[:, :, 1].astype(np.int64)
    tail_u = np.array([code.feedback_bit(s) for s in range(S)], dtype=np.int64)
    return nxt, par, tail_u


_NXT, _PAR, _TAIL_U = _tables()
# adders per trellis step: one per branch whose (u, p) label is nonzero
_BRANCH_ADDS = int(sum(1 for s in range(8) for u in (0, 1) if u or _PAR[s, u]))


@njit(cache=True, nogil=True)
def _sat(x, lim):
    if x > lim:
        return lim
    if x < -lim:
        return -lim
    return x


@njit(cache=True, nogil=True)
def _scale(x, q):
    a = x if x >= 0 else -x
    m = (a * q + 128) >> 8
    return m if x >= 0 else -m


@njit(cache=True, nogil=True)
def _siso(ls, lp, la, tx, tz, terminated, nxt, par, tail_u, alpha_q8, msg_max, met_max,
          ext, app, counts, g_step, g_off):
    """One Max-Log-MAP pass; writes extrinsic ``ext`` and a-posteriori ``app`` (metric units)."""
    K = ls.size
    S = 8
    T = 3 if terminated else 0
    NEG = -met_max
    alpha = np.empty((K + 1, S), dtype=np.int64)
    beta = np.empty(S, dtype=np.int64)
    bn = np.empty(S, dtype=np.int64)
    lsa = np.empty(K, dtype=np.int64)
    for t in range(K):
        lsa[t] = ls[t] + la[t]
    # forward
    for s in range(S):
        alpha[0, s] = NEG
    alpha[0, 0] = 0
    for t in range(K):
        for s in range(S):
            alpha[t + 1, s] = -(1 << 40)
        for s in range(S):
            for u in range(2):
                g = -u * lsa[t] - par[s, u] * lp[t]
                if t == g_step:
                    g += g_off
                m = alpha[t, s] + g
                s2 = nxt[s, u]
                if m > alpha[t + 1, s2]:
                    alpha[t + 1, s2] = m
        mx = alpha[t + 1, 0]
        for s in range(1, S):
            if alpha[t + 1, s] > mx:
                mx = alpha[t + 1, s]
        for s in range(S):
            alpha[t + 1, s] = _sat(alpha[t + 1, s] - mx, met_max)
    # backward through the termination steps
    if terminated:
        for s in range(S):
            beta[s] = NEG
        beta[0] = 0
        for k in range(T - 1, -1, -1):
            for s in range(S):
                u = tail_u[s]
                g = -u * tx[k] - par[s, u] * tz[k]
                bn[s] = beta[nxt[s, u]] + g
            mx = bn[0]
            for s in range(1, S):
                if bn[s] > mx:
                    mx = bn[s]
            for s in range(S):
                beta[s] = _sat(bn[s] - mx, met_max)
    else:
        for s in range(S):
            beta[s] = 0
    # backward through the data steps, emitting LLRs
    for t in range(K - 1, -1, -1):
        best0 = -(1 << 40)
        best1 = -(1 << 40)
        for s in range(S):
            bn[s] = -(1 << 40)
        for s in range(S):
            for u in range(2):
                g = -u * lsa[t] - par[s, u] * lp[t]
                if t == g_step:
                    g += g_off
                b = beta[nxt[s, u]] + g
                if b > bn[s]:
                    bn[s] = b
                m = alpha[t, s] + b
                if u == 0:
                    if m > best0:
                        best0 = m
                elif m > best1:
                    best1 = m
        lam = best0 - best1
        app[t] = lam
        ext[t] = _sat(_scale(lam - lsa[t], alpha_q8), msg_max)
        mx = bn[0]
        for s in range(1, S):
            if bn[s] > mx:
                mx = bn[s]
        for s in range(S):
            beta[s] = _sat(bn[s] - mx, met_max)
    # datapath charges: gamma 2 adds; alpha and beta each one add per nonzero branch and
    # one MAX2 per state; LLR 16 adds, 14 MAX2, 2 subtractions and one scaling
    ba = _BRANCH_ADDS
    counts[_ADD8] += K * (2 + 2 * ba + 16) + T * (1 + S)
    counts[_MAX2] += K * (2 * S + 14)
    counts[_SUB8] += K * 2
    counts[_SCALE] += K


@njit(cache=True, nogil=True)
def _decode_batch(sys, p1, p2, tails, perm, half_iters, early_stop, alpha_q8, msg_max, met_max,
                  nxt, par, tail_u, refs, hard_out, used_out, err_out, counts, memory, g_step, g_off):
    F, K = sys.shape
    track = refs.shape[0] == F
    ls2 = np.empty(K, dtype=np.int64)
    la1 = np.empty(K, dtype=np.int64)
    la2 = np.empty(K, dtype=np.int64)
    ext = np.empty(K, dtype=np.int64)
    app = np.empty(K, dtype=np.int64)
    hard = np.empty(K, dtype=np.uint8)
    prev = np.empty(K, dtype=np.uint8)
    tx1 = np.empty(3, dtype=np.int64)
    tz1 = np.empty(3, dtype=np.int64)
    tx2 = np.empty(3, dtype=np.int64)
    tz2 = np.empty(3, dtype=np.int64)
    for f in range(F):
        for k in range(3):
            tx1[k] = tails[f, 2 * k]
            tz1[k] = tails[f, 2 * k + 1]
            tx2[k] = tails[f, 6 + 2 * k]
            tz2[k] = tails[f, 6 + 2 * k + 1]
        for i in range(K):
            ls2[i] = sys[f, perm[i]]
            la1[i] = 0
            hard[i] = 1 if sys[f, i] < 0 else 0
        if track:
            e = 0
            for i in range(K):
                if hard[i] != refs[f, i]:
                    e += 1
            err_out[f, 0] = e
        used = 0
        for h in range(half_iters):
            if h % 2 == 0:
                _siso(sys[f], p1[f], la1, tx1, tz1, True, nxt, par, tail_u, alpha_q8, msg_max, met_max,
                      ext, app, counts, g_step, g_off)
                for i in range(K):
                    la2[i] = ext[perm[i]]
                    hard[i] = 1 if app[i] < 0 else 0
            else:
                _siso(ls2, p2[f], la2, tx2, tz2, True, nxt, par, tail_u, alpha_q8, msg_max, met_max,
                      ext, app, counts, g_step, g_off)
                for i in range(K):
                    la1[perm[i]] = ext[i]
                    hard[perm[i]] = 1 if app[i] < 0 else 0
            memory[0] += 4 * K
            memory[1] += K
            used = h + 1
            if track:
                e = 0
                for i in range(K):
                    if hard[i] != refs[f, i]:
                        e += 1
                err_out[f, used] = e
            stop = False
            if early_stop and h > 0:
                stop = True
                for i in range(K):
                    if hard[i] != prev[i]:
                        stop = False
                        break
            for i in range(K):
                prev[i] = hard[i]
            if stop:
                break
        if track:
            for j in range(used + 1, half_iters + 1):
                err_out[f, j] = err_out[f, used]
        used_out[f] = used
        for i in range(K):
            hard_out[f, i] = hard[i]


@dataclass(frozen=True)
class TurboIterCount:
    half_iterations: int

    def __post_init__(self):
        if int(self.half_iterations) != self.half_iterations or self.half_iterations < 1:
            raise ValueError("half_iterations must be an integer >= 1")

    @classmethod
    def from_iterations(cls, iterations: float) -> "TurboIterCount":
        h = iterations * 2
        if h != int(h):
            raise ValueError("iterations must be a multiple of 0.5")
        return cls(int(h))

    @property
    def iterations(self) -> float:
        return self.half_iterations / 2


@dataclass
class TurboResult:
    bits: np.ndarray  # (F, K)
    half_iterations_used: np.ndarray  # (F,)
    ledger: OpLedger
    info_errors: np.ndarray | None = None  # (F, half_iters + 1)


@dataclass
class TurboDecoder:
    code: TurboCode
    scale: float = 0.75
    fmt: LlrFormat = DEFAULT_FORMAT
    headroom_bits: int = 4

    def __post_init__(self):
        self._q = scale_factor_q8(self.scale)
        self._perm = np.ascontiguousarray(self.code.permutation, dtype=np.int64)

    @property
    def metric_format(self) -> LlrFormat:
        return self.fmt.widened(self.headroom_bits)

    def decode_streams(self, sys, p1, p2, tails, iters, early_stop: bool = False, reference=None,
                       gamma_offset: tuple[int, int] = (-1, 0)) -> TurboResult:
        h = iters.half_iterations if isinstance(iters, TurboIterCount) else TurboIterCount(iters).half_iterations
        K = self.code.K
        arrs = []
        for a, n in ((sys, K), (p1, K), (p2, K), (tails, 12)):
            a = np.atleast_2d(np.asarray(a)).astype(np.int64)
            if a.shape[1] != n:
                raise ValueError(f"stream length {a.shape[1]} != {n}")
            arrs.append(np.clip(a, -self.fmt.max_code, self.fmt.max_code))
        F = arrs[0].shape[0]
        if any(a.shape[0] != F for a in arrs):
            raise ValueError("streams disagree on frame count")
        if reference is not None:
            refs = np.ascontiguousarray(np.atleast_2d(np.asarray(reference, dtype=np.uint8)))
            if refs.shape != (F, K):
                raise ValueError("reference must be (frames, K)")
            err = np.zeros((F, h + 1), dtype=np.int64)
        else:
            refs = np.zeros((0, 1), dtype=np.uint8)
            err = np.zeros((1, 1), dtype=np.int64)
        hard = np.empty((F, K), dtype=np.uint8)
        used = np.empty(F, dtype=np.int64)
        counts = np.zeros(NUM_KINDS, dtype=np.int64)
        memory = np.zeros(2, dtype=np.int64)
        _decode_batch(*arrs, self._perm, h, bool(early_stop), self._q, self.fmt.max_code, self.metric_format.max_code,
                      _NXT, _PAR, _TAIL_U, refs, hard, used, err, counts, memory, int(gamma_offset[0]), int(gamma_offset[1]))
        ledger = OpLedger.from_arrays(counts, memory, module="turbo", kernel="max-log-map")
        return TurboResult(hard, used, ledger, err if reference is not None else None)

    def decode(self, llrs, iters, early_stop: bool = False, reference=None) -> TurboResult:
        """Decode transmitted-order LLR codes, (L,) or (F, L); punctured positions are restored as zeros."""
        x = np.asarray(llrs)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        parts = [turbo_demultiplex(row, self.code) for row in x]
        streams = [np.stack([p[i] for p in parts]) for i in range(4)]
        res = self.decode_streams(*streams, iters, early_stop, reference)
        if single:
            res.bits = res.bits[0]
        return res


def turbo_decode(llrs, code: TurboCode, iters, early_stop: bool = False, reference=None, scale: float = 0.75):
    return TurboDecoder(code, scale).decode(llrs, iters, early_stop, reference)


def siso_max_log_map(sys_llr, par_llr, apriori, scale: float = 0.75, tail_sys=None, tail_par=None,
                     fmt: LlrFormat = DEFAULT_FORMAT, headroom_bits: int = 4, gamma_offset=(-1, 0)):
    """Single constituent pass on integer codes; returns (extrinsic, app, ledger).

    Without tail LLRs the trellis end is left open (uniform final metrics).
    """
    ls, lp, la = (np.asarray(a, dtype=np.int64) for a in (sys_llr, par_llr, apriori))
    if not ls.shape == lp.shape == la.shape or ls.ndim != 1:
        raise ValueError("systematic, parity and a-priori streams must be equal-length vectors")
    terminated = tail_sys is not None
    tx = np.zeros(3, dtype=np.int64) if tail_sys is None else np.asarray(tail_sys, dtype=np.int64)
    tz = np.zeros(3, dtype=np.int64) if tail_par is None else np.asarray(tail_par, dtype=np.int64)
    ext = np.empty(ls.size, dtype=np.int64)
    app = np.empty(ls.size, dtype=np.int64)
    counts = np.zeros(NUM_KINDS, dtype=np.int64)
    q = int(round(scale * 256))
    if abs(q / 256 - scale) > 1e-12 or not 0 <= q <= 256:
        raise ValueError("scale must be a Q0.8 value in [0, 1]")
    _siso(ls, lp, la, tx, tz, terminated, _NXT, _PAR, _TAIL_U, q, fmt.max_code,
          fmt.widened(headroom_bits).max_code, ext, app, counts, int(gamma_offset[0]), int(gamma_offset[1]))
    return ext, app, OpLedger.from_arrays(counts, module="turbo", kernel="siso")
