"""Regenerate the bundled QC-LDPC base matrices (development tool, not installed).

Each rate uses 24 base columns with an 802.11n-style parity part: a weight-3
first parity column (shift 1 top and bottom, 0 in the middle) and a zero-shift
dual diagonal.  Information-column shifts are drawn greedily so that the
lifted graph avoids 4-cycles wherever the lifting allows, preferring shifts
that close few 6-cycles.

    python tools/make_codes.py [--out src/decbench/data/codes]
"""

import argparse
from pathlib import Path

import numpy as np

NB = 24

# info column degrees per rate; rows of each column are spread to balance check degrees
PROFILES = {
    "r13": (16, [16, 16] + [3] * 6),
    "r12": (12, [8, 8, 8, 8] + [3] * 8),
    "r34": (6, [6, 6, 6] + [4] * 15),
    "r56": (4, [4] * 19 + [3]),
}

LIFTINGS = {
    "r13": [27, 128],
    "r12": [27, 86],
    "r34": [27, 57],
    "r56": [27, 51],
}


def parity_part(mb):
    P = -np.ones((mb, mb), dtype=np.int64)
    mid = mb // 2 if mb > 4 else 1
    P[0, 0] = 1
    P[mid, 0] = 0
    P[mb - 1, 0] = 1
    for j in range(1, mb):
        P[j - 1, j] = 0
        P[j, j] = 0
    return P


def place_rows(mb, degrees, rng):
    """Choose row supports for each info column, keeping check degrees balanced."""
    load = np.zeros(mb)
    load += (parity_part(mb) >= 0).sum(axis=1)
    support = []
    for d in degrees:
        noise = rng.random(mb) * 0.5
        rows = np.argsort(load + noise)[:d]
        load[rows] += 1
        support.append(sorted(rows.tolist()))
    return support


def four_cycles(B, Z, i, j, s):
    """Number of 4-cycles that B[i, j] = s would close with already placed entries."""
    mb, nb = B.shape
    n = 0
    for j2 in range(nb):
        if j2 == j or B[i, j2] < 0:
            continue
        for i2 in range(mb):
            if i2 == i or B[i2, j] < 0 or B[i2, j2] < 0:
                continue
            if (s - B[i, j2] + B[i2, j2] - B[i2, j]) % Z == 0:
                n += 1
    return n


def six_cycles_through(B, Z, i, j, s):
    mb, nb = B.shape
    n = 0
    cols_i = [c for c in range(nb) if c != j and B[i, c] >= 0]
    rows_j = [r for r in range(mb) if r != i and B[r, j] >= 0]
    for c in cols_i:
        for r in rows_j:
            for c2 in range(nb):
                if c2 in (j, c) or B[r, c2] < 0:
                    continue
                for r2 in range(mb):
                    if r2 in (i, r) or B[r2, c] < 0 or B[r2, c2] < 0:
                        continue
                    tot = s - B[i, c] + B[r2, c] - B[r2, c2] + B[r, c2] - B[r, j]
                    if tot % Z == 0:
                        n += 1
    return n


def design(rate_key, Z, seed=1, tries=24):
    mb, degrees = PROFILES[rate_key]
    kb = NB - mb
    rng = np.random.default_rng([seed, Z, mb])
    B = -np.ones((mb, NB), dtype=np.int64)
    B[:, kb:] = parity_part(mb)
    support = place_rows(mb, degrees, rng)
    for j, rows in enumerate(support):
        for i in rows:
            # 4-cycles first (only unavoidable ones survive), then 6-cycles
            c4 = {int(s): four_cycles(B, Z, i, j, int(s)) for s in range(Z)}
            least = min(c4.values())
            cands = [s for s in rng.permutation(Z).tolist() if c4[s] == least][:tries]
            best = None
            for s in cands:
                c6 = six_cycles_through(B, Z, i, j, s)
                if best is None or c6 < best[0]:
                    best = (c6, s)
                if c6 == 0:
                    break
            B[i, j] = best[1]
    return B


def fmt(B, Z):
    w = max(len(str(int(x))) for x in B.reshape(-1))
    lines = [f"{B.shape[0]} {B.shape[1]} {Z}"]
    lines += [" ".join(str(int(x)).rjust(w) for x in row) for row in B]
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="src/decbench/data/codes")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for key, zs in LIFTINGS.items():
        for Z in zs:
            B = design(key, Z, args.seed)
            path = out / f"qc_{key}_z{Z}.txt"
            path.write_text(fmt(B, Z))
            print(path, "edges", int((B >= 0).sum()))


if __name__ == "__main__":
    main()
