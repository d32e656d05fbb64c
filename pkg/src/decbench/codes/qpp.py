"""QPP interleaver of the LTE turbo code."""

from __future__ import annotations

import csv
from functools import lru_cache

import numpy as np

from decbench.data import data_path


class UnsupportedBlockLength(ValueError):
    pass


@lru_cache(maxsize=4)
def _load_table(path: str) -> dict[int, tuple[int, int]]:
    table = {}
    with open(path, newline="") as fh:
        rows = (line for line in fh if not line.startswith("#"))
        for row in csv.DictReader(rows):
            table[int(row["K"])] = (int(row["f1"]), int(row["f2"]))
    return table


def qpp_table() -> dict[int, tuple[int, int]]:
    return dict(_load_table(str(data_path("qpp_lte.csv"))))


def supported_lengths() -> list[int]:
    return sorted(qpp_table())


def qpp_coefficients(K: int) -> tuple[int, int]:
    table = qpp_table()
    if K not in table:
        raise UnsupportedBlockLength(f"K={K} has no QPP coefficients")
    return table[K]


def next_supported_length(K: int) -> int:
    for k in supported_lengths():
        if k >= K:
            return k
    raise UnsupportedBlockLength(f"K={K} exceeds the largest supported block length")


def qpp_permute(i: int, K: int, f1: int | None = None, f2: int | None = None) -> int:
    if f1 is None or f2 is None:
        f1, f2 = qpp_coefficients(K)
    elif K not in qpp_table():
        raise UnsupportedBlockLength(f"K={K} has no QPP coefficients")
    if not 0 <= i < K:
        raise IndexError(f"index {i} outside [0, {K})")
    return (f1 * i + f2 * i * i) % K


def qpp_permutation(K: int, f1: int | None = None, f2: int | None = None) -> np.ndarray:
    """Whole map pi with pi[i] = (f1 i + f2 i^2) mod K, computed without overflow."""
    if f1 is None or f2 is None:
        f1, f2 = qpp_coefficients(K)
    i = np.arange(K, dtype=np.int64)
    return (f1 * i + f2 * ((i * i) % K)) % K


def is_bijection(perm) -> bool:
    perm = np.asarray(perm)
    return bool(np.array_equal(np.sort(perm), np.arange(perm.size)))
