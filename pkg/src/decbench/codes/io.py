"""Text formats: alist sparse matrices and QC base matrices ("rows cols Z" header)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from decbench.codes.qc import QcLdpcCode, SparseParityMatrix


class CodeParseError(ValueError):
    def __init__(self, path, line: int, col: int, msg: str):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.path, self.line, self.col = str(path), line, col


class _Tokens:
    """Integer tokens with 1-based (line, column) positions; '#' starts a comment."""

    def __init__(self, text: str, path):
        self.path = path
        self.items = []
        self.lines = text.splitlines()
        for ln, line in enumerate(self.lines, 1):
            body = line.split("#", 1)[0]
            pos = 0
            for tok in body.split():
                pos = body.index(tok, pos)
                self.items.append((tok, ln, pos + 1))
                pos += len(tok)
        self.k = 0

    def error(self, msg, where=None):
        if where is None:
            where = self.items[self.k] if self.k < len(self.items) else (None, len(self.lines) + 1, 1)
        return CodeParseError(self.path, where[1], where[2], msg)

    def next_int(self, what: str) -> int:
        if self.k >= len(self.items):
            raise self.error(f"unexpected end of file reading {what}")
        tok = self.items[self.k]
        try:
            v = int(tok[0])
        except ValueError:
            raise self.error(f"expected integer for {what}, got {tok[0]!r}", tok) from None
        self.k += 1
        return v

    def line_ints(self, what: str) -> tuple[list[int], tuple]:
        """All remaining integers on the current token's line."""
        if self.k >= len(self.items):
            raise self.error(f"unexpected end of file reading {what}")
        start = self.items[self.k]
        out = []
        while self.k < len(self.items) and self.items[self.k][1] == start[1]:
            out.append(self.next_int(what))
        return out, start

    def done(self):
        if self.k < len(self.items):
            raise self.error("trailing data")


def _read(path) -> str:
    return Path(path).read_text()


def parse_alist(text: str, path="<alist>") -> SparseParityMatrix:
    t = _Tokens(text, path)
    n, m = t.next_int("n"), t.next_int("m")
    if n <= 0 or m <= 0:
        raise t.error("matrix dimensions must be positive", t.items[0])
    max_c, max_r = t.next_int("max column degree"), t.next_int("max row degree")
    col_deg = [t.next_int("column degree") for _ in range(n)]
    row_deg = [t.next_int("row degree") for _ in range(m)]
    if max(col_deg) != max_c or max(row_deg) != max_r:
        raise t.error("maximum degree in header disagrees with degree lists", t.items[2])
    cols = []
    for v in range(n):
        vals, where = t.line_ints(f"column {v + 1}")
        nz = [x for x in vals if x != 0]
        if len(nz) != col_deg[v]:
            raise t.error(f"column {v + 1} lists {len(nz)} entries, header says {col_deg[v]}", where)
        if any(x < 1 or x > m for x in nz):
            raise t.error(f"column {v + 1} has a row index outside [1, {m}]", where)
        cols.append(nz)
    rows = []
    for c in range(m):
        vals, where = t.line_ints(f"row {c + 1}")
        nz = [x for x in vals if x != 0]
        if len(nz) != row_deg[c]:
            raise t.error(f"row {c + 1} lists {len(nz)} entries, header says {row_deg[c]}", where)
        if any(x < 1 or x > n for x in nz):
            raise t.error(f"row {c + 1} has a column index outside [1, {n}]", where)
        rows.append([x - 1 for x in nz])
    t.done()
    from_cols = sorted((r - 1, v) for v, rs in enumerate(cols) for r in rs)
    from_rows = sorted((r, v) for r, vs in enumerate(rows) for v in vs)
    if from_cols != from_rows:
        raise CodeParseError(path, 1, 1, "column and row lists describe different matrices")
    return SparseParityMatrix.from_rows(n, rows)


def load_alist(path) -> SparseParityMatrix:
    return parse_alist(_read(path), path)


def format_alist(H: SparseParityMatrix) -> str:
    cp, edges = H.column_view
    er = H.edge_row
    cd, rd = H.col_degrees, H.row_degrees
    mc, mr = int(cd.max()), int(rd.max())
    out = [f"{H.n} {H.m}", f"{mc} {mr}", " ".join(map(str, cd)), " ".join(map(str, rd))]
    for v in range(H.n):
        rs = sorted(int(er[e]) + 1 for e in edges[cp[v] : cp[v + 1]])
        out.append(" ".join(map(str, rs + [0] * (mc - len(rs)))))
    for r in range(H.m):
        vs = [int(v) + 1 for v in H.row(r)]
        out.append(" ".join(map(str, vs + [0] * (mr - len(vs)))))
    return "\n".join(out) + "\n"


def write_alist(H: SparseParityMatrix, path) -> None:
    Path(path).write_text(format_alist(H))


def parse_base_matrix(text: str, path="<base>", name: str = "") -> QcLdpcCode:
    """Header ``rows cols Z`` then one row of shifts per line; -1 marks an empty block.

    Shifts are not range-checked here so that validate_code can report them.
    """
    t = _Tokens(text, path)
    rows, cols, Z = t.next_int("rows"), t.next_int("cols"), t.next_int("Z")
    if rows <= 0 or cols <= 0 or Z <= 0:
        raise t.error("rows, cols and Z must be positive", t.items[0])
    base = np.empty((rows, cols), dtype=np.int64)
    for i in range(rows):
        vals, where = t.line_ints(f"base row {i + 1}")
        if len(vals) != cols:
            raise t.error(f"base row {i + 1} has {len(vals)} entries, expected {cols}", where)
        base[i] = vals
    t.done()
    return QcLdpcCode(base, Z, name or Path(str(path)).stem)


def load_base_matrix(path) -> QcLdpcCode:
    return parse_base_matrix(_read(path), path)


def format_base_matrix(code: QcLdpcCode) -> str:
    b = code.base_matrix
    w = max(len(str(int(x))) for x in b.reshape(-1))
    lines = [f"{code.mb} {code.nb} {code.Z}"]
    lines += [" ".join(str(int(x)).rjust(w) for x in row) for row in b]
    return "\n".join(lines) + "\n"


def write_base_matrix(code: QcLdpcCode, path) -> None:
    Path(path).write_text(format_base_matrix(code))
