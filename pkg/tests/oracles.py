"""Independent reference implementations used only by the tests.

Each oracle is written from the textbook definition, without sharing code
with the package, so agreement is evidence rather than tautology.
"""

import itertools
import math

import numpy as np


def qpp_naive(K, f1, f2):
    return [(f1 * i + f2 * i * i) % K for i in range(K)]


def dense_qc(base, Z):
    """Expand a base matrix with explicit rolled identities."""
    base = np.asarray(base)
    mb, nb = base.shape
    H = np.zeros((mb * Z, nb * Z), dtype=np.uint8)
    I = np.eye(Z, dtype=np.uint8)
    for i in range(mb):
        for j in range(nb):
            s = int(base[i, j])
            if s >= 0:
                H[i * Z:(i + 1) * Z, j * Z:(j + 1) * Z] = np.roll(I, s, axis=1)
    return H


def gf2_syndrome(H_dense, x):
    return (np.asarray(H_dense, dtype=np.int64) @ np.asarray(x, dtype=np.int64)) % 2


def shift_register_encode(bits, gens_octal, K):
    """Feed-forward encoder with an explicit register; zero-terminated, time-major output."""
    L = max(len(format(int(str(g), 8), "b")) for g in gens_octal)
    taps = []
    for g in gens_octal:
        v = int(str(g), 8)
        taps.append([(v >> (L - 1 - d)) & 1 for d in range(L)])
    reg = [0] * L  # reg[0] = current input, reg[d] = input d steps ago
    out = []
    for u in list(bits) + [0] * (L - 1):
        reg = [int(u)] + reg[:-1]
        for t in taps:
            out.append(sum(a & b for a, b in zip(t, reg)) % 2)
    return np.array(out, dtype=np.uint8)


def lte_rsc_reference(bits):
    """8-state RSC, feedback 1+D^2+D^3, feedforward 1+D+D^3; returns (parity, tail_x, tail_z)."""
    d1 = d2 = d3 = 0
    par = []
    for u in bits:
        a = int(u) ^ d2 ^ d3
        par.append(a ^ d1 ^ d3)
        d1, d2, d3 = a, d1, d2
    tx, tz = [], []
    for _ in range(3):
        u = d2 ^ d3
        a = u ^ d2 ^ d3
        tx.append(u)
        tz.append(a ^ d1 ^ d3)
        d1, d2, d3 = a, d1, d2
    assert (d1, d2, d3) == (0, 0, 0)
    return np.array(par, dtype=np.uint8), np.array(tx, dtype=np.uint8), np.array(tz, dtype=np.uint8)


def boxplus(a, b):
    """Exact LLR combination sign(a)sign(b)min(|a|,|b|) + log(1+e^-|a+b|) - log(1+e^-|a-b|)."""
    s = math.copysign(1.0, a) * math.copysign(1.0, b)
    if a == 0 or b == 0:
        s = 0.0 if min(abs(a), abs(b)) == 0 else s
    return s * min(abs(a), abs(b)) + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))


def sum_product_check(inputs):
    """Exact check-node update: output j is the boxplus of all other inputs."""
    out = []
    for j in range(len(inputs)):
        others = [x for k, x in enumerate(inputs) if k != j]
        acc = others[0]
        for x in others[1:]:
            acc = boxplus(acc, x)
        out.append(acc)
    return out


def min_sum_leave_one_out(inputs, alpha=1.0):
    out = []
    for j in range(len(inputs)):
        others = [x for k, x in enumerate(inputs) if k != j]
        sign = 1
        for x in others:
            if x < 0:
                sign = -sign
        mag = min(abs(x) for x in others)
        out.append(alpha * sign * mag)
    return out


def rsc_step_table():
    """(next_state, parity) of the LTE RSC for state = (d1 d2 d3) as d1*4 + d2*2 + d3."""
    nxt, par = {}, {}
    for s in range(8):
        d1, d2, d3 = (s >> 2) & 1, (s >> 1) & 1, s & 1
        for u in (0, 1):
            a = u ^ d2 ^ d3
            par[s, u] = a ^ d1 ^ d3
            nxt[s, u] = (a << 2) | (d1 << 1) | d2
    return nxt, par


def max_log_app_bruteforce(ls, lp, la):
    """APP LLRs of an open-ended RSC trellis by enumerating every input sequence.

    Path metric: sum over steps of -u (ls + la) - p lp; APP = best(u_k = 0) - best(u_k = 1).
    """
    nxt, par = rsc_step_table()
    K = len(ls)
    best = [[-math.inf, -math.inf] for _ in range(K)]
    for u in itertools.product((0, 1), repeat=K):
        s, m = 0, 0
        for t in range(K):
            p = par[s, u[t]]
            m += -u[t] * (ls[t] + la[t]) - p * lp[t]
            s = nxt[s, u[t]]
        for t in range(K):
            if m > best[t][u[t]]:
                best[t][u[t]] = m
    return np.array([b[0] - b[1] for b in best])


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2))
