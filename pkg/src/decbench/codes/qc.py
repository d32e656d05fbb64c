"""Quasi-cyclic LDPC codes with a dual-diagonal parity part.

Shift ``s`` in a base entry stands for the Z x Z identity cyclically shifted
right by ``s``: row ``r`` of the block has its one in column ``(r + s) % Z``.
Applied to a vector that is ``P^s x = roll(x, -s)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np


class InvalidShift(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseParityMatrix:
    """Binary H stored by rows (CSR) with a column view; edges are numbered row-major."""

    m: int
    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray

    def __post_init__(self):
        rp = np.asarray(self.row_ptr, dtype=np.int64)
        ci = np.asarray(self.col_idx, dtype=np.int64)
        if rp.size != self.m + 1 or rp[0] != 0 or rp[-1] != ci.size or np.any(np.diff(rp) < 0):
            raise ValueError("malformed row pointer")
        if ci.size and (ci.min() < 0 or ci.max() >= self.n):
            raise ValueError("column index out of range")
        for r in range(self.m):
            row = ci[rp[r] : rp[r + 1]]
            if np.unique(row).size != row.size:
                raise ValueError(f"duplicate entry in row {r}")
        for a in (rp, ci):
            a.setflags(write=False)
        object.__setattr__(self, "row_ptr", rp)
        object.__setattr__(self, "col_idx", ci)

    @classmethod
    def from_rows(cls, n: int, rows) -> "SparseParityMatrix":
        rows = [sorted(int(c) for c in r) for r in rows]
        rp = np.zeros(len(rows) + 1, dtype=np.int64)
        rp[1:] = np.cumsum([len(r) for r in rows])
        ci = np.array([c for r in rows for c in r], dtype=np.int64)
        return cls(len(rows), n, rp, ci)

    @classmethod
    def from_dense(cls, H) -> "SparseParityMatrix":
        H = np.asarray(H)
        return cls.from_rows(H.shape[1], [np.flatnonzero(row) for row in H])

    def __eq__(self, other):
        return (
            isinstance(other, SparseParityMatrix)
            and (self.m, self.n) == (other.m, other.n)
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
        )

    @property
    def nnz(self) -> int:
        return int(self.col_idx.size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.n

    def row(self, r: int) -> np.ndarray:
        return self.col_idx[self.row_ptr[r] : self.row_ptr[r + 1]]

    @cached_property
    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    @cached_property
    def col_degrees(self) -> np.ndarray:
        return np.bincount(self.col_idx, minlength=self.n)

    @cached_property
    def edge_row(self) -> np.ndarray:
        return np.repeat(np.arange(self.m), self.row_degrees)

    @cached_property
    def column_view(self) -> tuple[np.ndarray, np.ndarray]:
        """(col_ptr, edges) such that edges[col_ptr[v]:col_ptr[v+1]] are the edges of column v."""
        order = np.argsort(self.col_idx, kind="stable")
        cp = np.zeros(self.n + 1, dtype=np.int64)
        cp[1:] = np.cumsum(self.col_degrees)
        return cp, order.astype(np.int64)

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        H[self.edge_row, self.col_idx] = 1
        return H

    def syndrome_vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.uint8).reshape(-1)
        if x.size != self.n:
            raise ValueError(f"word length {x.size} != {self.n}")
        return np.bitwise_xor.reduceat(x[self.col_idx], self.row_ptr[:-1]) if self.nnz else np.zeros(self.m, np.uint8)


def syndrome(hard_bits, H: SparseParityMatrix) -> bool:
    """True iff H x^T = 0 over GF(2)."""
    s = H.syndrome_vector(hard_bits)
    # reduceat returns x[start] for empty rows; those rows are trivially satisfied
    s = np.where(H.row_degrees > 0, s, 0)
    return not s.any()


@dataclass(frozen=True, eq=False)
class QcLdpcCode:
    base_matrix: np.ndarray
    Z: int
    name: str = field(default="")

    def __post_init__(self):
        b = np.array(self.base_matrix, dtype=np.int64, copy=True)
        if b.ndim != 2:
            raise ValueError("base matrix must be 2-D")
        b.setflags(write=False)
        object.__setattr__(self, "base_matrix", b)
        if self.Z < 1:
            raise ValueError("lifting factor must be positive")

    def __eq__(self, other):
        return isinstance(other, QcLdpcCode) and self.Z == other.Z and np.array_equal(self.base_matrix, other.base_matrix)

    @property
    def mb(self) -> int:
        return self.base_matrix.shape[0]

    @property
    def nb(self) -> int:
        return self.base_matrix.shape[1]

    @property
    def kb(self) -> int:
        return self.nb - self.mb

    @property
    def N(self) -> int:
        return self.nb * self.Z

    @property
    def K(self) -> int:
        return self.kb * self.Z

    @property
    def rate(self) -> Fraction:
        return Fraction(self.K, self.N)

    @property
    def base_nnz(self) -> int:
        return int((self.base_matrix >= 0).sum())

    @cached_property
    def H(self) -> SparseParityMatrix:
        return expand_qc(self)

    def with_lifting(self, Z: int, name: str | None = None) -> "QcLdpcCode":
        b = self.base_matrix
        return QcLdpcCode(np.where(b >= 0, b % Z, -1), Z, name if name is not None else self.name)


def expand_qc(code: QcLdpcCode) -> SparseParityMatrix:
    b, Z = code.base_matrix, code.Z
    bad = np.argwhere((b < -1) | (b >= Z))
    if bad.size:
        i, j = bad[0]
        raise InvalidShift(f"shift {b[i, j]} at base ({i},{j}) outside [-1, {Z})")
    rows = []
    r = np.arange(Z)
    for i in range(code.mb):
        blocks = [(j, int(b[i, j])) for j in range(code.nb) if b[i, j] >= 0]
        for t in r:
            rows.append([j * Z + (t + s) % Z for j, s in blocks])
    return SparseParityMatrix.from_rows(code.N, rows)


def parity_structure(code: QcLdpcCode) -> tuple[int, int, int]:
    """Check the dual-diagonal parity part and return (top shift, middle row, middle shift)."""
    b, mb, kb = code.base_matrix, code.mb, code.kb
    if mb < 2:
        raise ValueError("parity part needs at least 2 block rows")
    first = b[:, kb]
    nz = np.flatnonzero(first >= 0)
    if nz.size != 3 or nz[0] != 0 or nz[-1] != mb - 1 or first[0] != first[-1]:
        raise ValueError("first parity column must have weight 3 with equal top and bottom shifts")
    for j in range(1, mb):
        col = b[:, kb + j]
        want = np.full(mb, -1)
        want[j - 1] = 0
        want[j] = 0
        if not np.array_equal(col, want):
            raise ValueError(f"parity column {j} is not on the zero-shift dual diagonal")
    return int(first[0]), int(nz[1]), int(first[nz[1]])


def ldpc_encode(bits, code: QcLdpcCode) -> np.ndarray:
    """Systematic codeword [u | p] by block back-substitution; accepts (K,) or (F, K)."""
    u = np.asarray(bits, dtype=np.uint8)
    single = u.ndim == 1
    u = np.atleast_2d(u)
    if u.shape[1] != code.K:
        raise ValueError(f"expected {code.K} bits, got {u.shape[1]}")
    b, Z, mb, kb = code.base_matrix, code.Z, code.mb, code.kb
    top, mid, mid_shift = parity_structure(code)
    F = u.shape[0]
    ub = u.reshape(F, kb, Z)
    lam = np.zeros((F, mb, Z), dtype=np.uint8)
    for i in range(mb):
        for j in range(kb):
            if b[i, j] >= 0:
                lam[:, i] ^= np.roll(ub[:, j], -int(b[i, j]), axis=1)
    p = np.zeros((F, mb, Z), dtype=np.uint8)
    # summing all block rows cancels the dual diagonal and the equal top/bottom blocks
    p[:, 0] = np.roll(np.bitwise_xor.reduce(lam, axis=1), mid_shift, axis=1)
    p[:, 1] = lam[:, 0] ^ np.roll(p[:, 0], -top, axis=1)
    for i in range(1, mb - 1):
        p[:, i + 1] = lam[:, i] ^ p[:, i]
        if i == mid:
            p[:, i + 1] ^= np.roll(p[:, 0], -mid_shift, axis=1)
    out = np.concatenate([u, p.reshape(F, -1)], axis=1)
    return out[0] if single else out
