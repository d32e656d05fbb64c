from fractions import Fraction

import numpy as np
import pytest

from decbench.codes.conv import CC_133_171, ConvCode
from decbench.codes.io import parse_base_matrix
from decbench.codes.qc import SparseParityMatrix
from decbench.codes.registry import UnknownCode, bundled_ldpc, bundled_ldpc_files, resolve_code
from decbench.codes.turbo import lte_turbo_code
from decbench.codes.validate import validate_code
from decbench.data import data_path


def test_bundled_rates_present():
    keys = {k for k, _ in bundled_ldpc_files()}
    assert {"r13", "r12", "r34", "r56"} <= keys
    for key, rate in (("r13", Fraction(1, 3)), ("r12", Fraction(1, 2)), ("r34", Fraction(3, 4)), ("r56", Fraction(5, 6))):
        assert bundled_ldpc(key).rate == rate


def test_every_bundled_code_validates():
    for (key, Z), _ in bundled_ldpc_files().items():
        assert validate_code(bundled_ldpc(key, Z)).ok
    for K in (40, 1024, 6144):
        assert validate_code(lte_turbo_code(K)).ok
    assert validate_code(CC_133_171).ok


def test_validation_catches_broken_structures():
    bad = SparseParityMatrix.from_dense([[1, 0, 1], [1, 0, 0]])
    rules = {v["rule"] for v in validate_code(bad).violations}
    assert rules == {"h.zero_column", "h.degenerate_row"}
    with pytest.raises(TypeError):
        validate_code("not a code")


def test_resolve_ids():
    assert resolve_code("ldpc-r12").family == "ldpc"
    assert resolve_code("ldpc-r34-z27").code.Z == 27
    t = resolve_code("turbo-r13-k6140")
    assert t.K == 6144 and t.substitutions == ("K 6140 -> 6144 (no QPP coefficients for 6140)",)
    assert resolve_code("turbo-r13-k1024").substitutions == ()
    c = resolve_code("cc-r34")
    assert c.family == "conv" and c.rate == Fraction(3, 4)
    u = resolve_code("uncoded-k100")
    assert u.K == 100 and u.rate == 1
    a = resolve_code("alist:" + str(data_path("codes", "example_3x6.alist")))
    assert a.K == 3 and a.family == "ldpc"
    with pytest.raises(UnknownCode):
        resolve_code("polar-r12")


def test_resolve_base_file(tmp_path):
    p = tmp_path / "tiny.txt"
    p.write_text("2 4 3\n0 1 0 -1\n2 -1 0 0\n")
    r = resolve_code(f"base:{p}")
    assert r.K == 6 and r.code.N == 12
    assert np.array_equal(r.code.base_matrix, parse_base_matrix(p.read_text()).base_matrix)
