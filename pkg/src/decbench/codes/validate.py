"""Invariant checks returning machine-readable violation lists."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from decbench.codes.conv import ConvCode, octal_taps
from decbench.codes.puncture import PuncturePattern
from decbench.codes.qc import QcLdpcCode, SparseParityMatrix, ldpc_encode, parity_structure, syndrome
from decbench.codes.qpp import is_bijection, qpp_permutation, qpp_table
from decbench.codes.turbo import TurboCode


@dataclass
class ValidationReport:
    kind: str
    name: str
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, message: str, **where):
        self.violations.append({"rule": rule, "message": message, **where})

    def to_dict(self) -> dict:
        return {"kind": self.kind, "name": self.name, "ok": self.ok, "violations": list(self.violations)}


def _check_puncture(rep: ValidationReport, p: PuncturePattern, streams: int):
    if p.streams != streams:
        rep.add("puncture.streams", f"mask has {p.streams} rows, code has {streams} outputs")
    if p.kept_count == 0:
        rep.add("puncture.empty", "pattern keeps no bits")


def _validate_conv(code: ConvCode, rep: ValidationReport):
    if code.constraint_length < 2:
        rep.add("conv.constraint_length", "constraint length below 2")
    if code.n < 2:
        rep.add("conv.generators", "fewer than 2 generators")
    for g in code.generators:
        try:
            octal_taps(g, code.constraint_length)
        except ValueError as e:
            rep.add("conv.generator_range", str(e), generator=g)
    t = code.trellis
    if t.num_states != 2 ** (code.constraint_length - 1):
        rep.add("conv.states", "trellis size disagrees with constraint length")
    preds = np.bincount(t.next_state.reshape(-1), minlength=t.num_states)
    if not np.all(preds == 2):
        rep.add("conv.predecessors", "some state lacks exactly two predecessors")
    if code.puncture is not None:
        _check_puncture(rep, code.puncture, code.n)


def _validate_turbo(code: TurboCode, rep: ValidationReport):
    table = qpp_table()
    if code.K not in table:
        rep.add("turbo.K", f"K={code.K} has no QPP coefficients")
    if not is_bijection(qpp_permutation(code.K, *code.qpp)):
        rep.add("turbo.qpp", f"QPP {code.qpp} is not a bijection for K={code.K}")
    if code.constituent.num_states != 8 or not code.constituent.recursive:
        rep.add("turbo.constituent", "constituent is not an 8-state RSC")
    if code.puncture is not None:
        _check_puncture(rep, code.puncture, 3)
        if not code.puncture.keep_mask[0].all():
            rep.add("turbo.systematic", "pattern drops systematic bits")


def _validate_qc(code: QcLdpcCode, rep: ValidationReport, probe_seed: int):
    b, Z = code.base_matrix, code.Z
    for i, j in np.argwhere((b < -1) | (b >= Z)):
        rep.add("qc.shift_range", f"shift {int(b[i, j])} outside [-1, {Z})", row=int(i), col=int(j))
    if not rep.ok:
        return
    if code.mb >= code.nb:
        rep.add("qc.rate", "no information columns")
        return
    try:
        parity_structure(code)
    except ValueError as e:
        rep.add("qc.dual_diagonal", str(e))
        return
    H = code.H
    col_deg = (b >= 0).sum(axis=0)
    if np.any(col_deg == 0):
        rep.add("qc.zero_column", "base matrix has an empty column")
    if H.nnz != Z * code.base_nnz:
        rep.add("qc.edge_count", "expanded edge count differs from Z * nnz(base)")
    if code.rate != Fraction(code.K, code.N):
        rep.add("qc.rate", "rate differs from K/N")
    rng = np.random.default_rng(probe_seed)
    cw = ldpc_encode(rng.integers(0, 2, code.K), code)
    if not syndrome(cw, H):
        rep.add("qc.encoder", "back-substitution output fails the parity checks")


def _validate_h(H: SparseParityMatrix, rep: ValidationReport):
    if np.any(H.col_degrees == 0):
        rep.add("h.zero_column", "matrix has an empty column")
    if np.any(H.row_degrees < 2):
        rep.add("h.degenerate_row", "matrix has a row of degree below 2")


def validate_code(spec, probe_seed: int = 0) -> ValidationReport:
    if isinstance(spec, TurboCode):
        rep = ValidationReport("turbo", spec.name)
        _validate_turbo(spec, rep)
    elif isinstance(spec, ConvCode):
        rep = ValidationReport("conv", spec.name)
        _validate_conv(spec, rep)
    elif isinstance(spec, QcLdpcCode):
        rep = ValidationReport("qc-ldpc", spec.name)
        _validate_qc(spec, rep, probe_seed)
    elif isinstance(spec, SparseParityMatrix):
        rep = ValidationReport("parity-matrix", "")
        _validate_h(spec, rep)
    else:
        raise TypeError(f"cannot validate {type(spec).__name__}")
    return rep
