"""Code identifiers used by the harness, the CLI and run manifests.

    cc-r12 | cc-r23 | cc-r34                 64-state (133,171) code, optionally punctured
    turbo-r13-k1024                          LTE turbo code, rate 13/12/23/34/56/910, any K
    ldpc-r12 | ldpc-r12-z27                  bundled QC-LDPC base at its largest (or given) lifting
    uncoded-k1024                            no coding, for channel sanity checks
    alist:path/to/file.alist                 arbitrary parity-check matrix
    base:path/to/file.txt                    arbitrary QC base matrix
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from decbench.codes.conv import ConvCode, reference_conv_code
from decbench.codes.io import load_alist, load_base_matrix
from decbench.codes.qc import QcLdpcCode, SparseParityMatrix
from decbench.codes.qpp import next_supported_length, qpp_table
from decbench.codes.turbo import TurboCode, lte_turbo_code
from decbench.data import data_path


class UnknownCode(ValueError):
    pass


@dataclass(frozen=True)
class Uncoded:
    K: int
    name: str = ""

    @property
    def rate(self) -> Fraction:
        return Fraction(1)


@dataclass(frozen=True)
class ResolvedCode:
    code_id: str
    code: object
    K: int
    rate: Fraction  # nominal rate used for Eb/N0 scaling
    family: str  # conv | turbo | ldpc | uncoded
    substitutions: tuple = ()  # human-readable notes such as "K 6140 -> 6144"


def _rate_key(s: str) -> Fraction:
    table = {"13": Fraction(1, 3), "12": Fraction(1, 2), "23": Fraction(2, 3), "34": Fraction(3, 4),
             "56": Fraction(5, 6), "910": Fraction(9, 10)}
    if s not in table:
        raise UnknownCode(f"unknown rate key r{s}")
    return table[s]


def bundled_ldpc_files() -> dict[tuple[str, int], Path]:
    out = {}
    for p in sorted(data_path("codes").glob("qc_r*_z*.txt")):
        m = re.fullmatch(r"qc_(r\d+)_z(\d+)\.txt", p.name)
        if m:
            out[(m.group(1), int(m.group(2)))] = p
    return out


def bundled_ldpc(rate_key: str, Z: int | None = None) -> QcLdpcCode:
    files = bundled_ldpc_files()
    zs = sorted(z for (r, z) in files if r == rate_key)
    if not zs:
        raise UnknownCode(f"no bundled LDPC code for {rate_key}")
    if Z is None:
        Z = zs[-1]
    if (rate_key, Z) not in files:
        raise UnknownCode(f"no bundled lifting Z={Z} for {rate_key} (have {zs})")
    code = load_base_matrix(files[(rate_key, Z)])
    return QcLdpcCode(code.base_matrix, code.Z, name=f"ldpc-{rate_key}-z{Z}")


def resolve_code(code_id: str) -> ResolvedCode:
    cid = code_id.strip()
    if cid.startswith("alist:"):
        H: SparseParityMatrix = load_alist(cid[6:])
        return ResolvedCode(cid, H, H.n - H.m, Fraction(H.n - H.m, H.n), "ldpc")
    if cid.startswith("base:"):
        c = load_base_matrix(cid[5:])
        return ResolvedCode(cid, c, c.K, c.rate, "ldpc")
    m = re.fullmatch(r"cc-r(\d+)", cid)
    if m:
        c: ConvCode = reference_conv_code(_rate_key(m.group(1)))
        return ResolvedCode(cid, c, 0, c.rate, "conv")
    m = re.fullmatch(r"turbo-r(\d+)-k(\d+)", cid)
    if m:
        rate, K = _rate_key(m.group(1)), int(m.group(2))
        subs = ()
        if K not in qpp_table():
            K2 = next_supported_length(K)
            subs = (f"K {K} -> {K2} (no QPP coefficients for {K})",)
            K = K2
        t: TurboCode = lte_turbo_code(K, rate)
        return ResolvedCode(cid, t, K, rate, "turbo", subs)
    m = re.fullmatch(r"ldpc-(r\d+)(?:-z(\d+))?", cid)
    if m:
        c = bundled_ldpc(m.group(1), int(m.group(2)) if m.group(2) else None)
        return ResolvedCode(cid, c, c.K, c.rate, "ldpc")
    m = re.fullmatch(r"uncoded-k(\d+)", cid)
    if m:
        K = int(m.group(1))
        return ResolvedCode(cid, Uncoded(K, cid), K, Fraction(1), "uncoded")
    raise UnknownCode(f"unrecognized code id {code_id!r}")
