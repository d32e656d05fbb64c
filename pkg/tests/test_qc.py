from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decbench.codes.qc import InvalidShift, QcLdpcCode, SparseParityMatrix, expand_qc, ldpc_encode, syndrome
from decbench.codes.registry import bundled_ldpc, bundled_ldpc_files
from oracles import dense_qc, gf2_syndrome


def test_identity_and_shift_examples():
    assert np.array_equal(expand_qc(QcLdpcCode([[0]], 3)).to_dense(), np.eye(3, dtype=np.uint8))
    H = expand_qc(QcLdpcCode([[1, -1]], 2)).to_dense()
    assert H.tolist() == [[0, 1, 0, 0], [1, 0, 0, 0]]


def test_invalid_shift():
    with pytest.raises(InvalidShift):
        expand_qc(QcLdpcCode([[3]], 3))
    with pytest.raises(InvalidShift):
        expand_qc(QcLdpcCode([[-2]], 3))


def test_all_bundled_codes_expand_like_the_dense_oracle():
    for (key, Z), _ in bundled_ldpc_files().items():
        code = bundled_ldpc(key, Z)
        H = code.H
        assert np.array_equal(H.to_dense(), dense_qc(code.base_matrix, Z))
        assert H.nnz == Z * code.base_nnz
        base_cols = (code.base_matrix >= 0).sum(axis=0)
        base_rows = (code.base_matrix >= 0).sum(axis=1)
        assert np.array_equal(H.col_degrees, np.repeat(base_cols, Z))
        assert np.array_equal(H.row_degrees, np.repeat(base_rows, Z))
        assert code.rate == Fraction(code.K, code.N) and H.m == code.N - code.K


def test_rate_half_z27_column_degrees():
    code = bundled_ldpc("r12", 27)
    dense = dense_qc(code.base_matrix, 27)
    assert np.array_equal(code.H.col_degrees, dense.sum(axis=0))


@settings(max_examples=15)
@given(st.sampled_from(sorted(bundled_ldpc_files())), st.integers(0, 2**32 - 1))
def test_encoder_output_is_a_codeword(key, seed):
    code = bundled_ldpc(*key)
    u = np.random.default_rng(seed).integers(0, 2, code.K).astype(np.uint8)
    c = ldpc_encode(u, code)
    assert np.array_equal(c[: code.K], u)
    assert syndrome(c, code.H)
    assert not gf2_syndrome(code.H.to_dense(), c).any()


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_encoder_linearity(seed):
    code = bundled_ldpc("r34", 27)
    rng = np.random.default_rng(seed)
    a, b = (rng.integers(0, 2, code.K).astype(np.uint8) for _ in range(2))
    assert np.array_equal(ldpc_encode(a ^ b, code), ldpc_encode(a, code) ^ ldpc_encode(b, code))


def test_batch_encoding_matches_single():
    code = bundled_ldpc("r56", 27)
    u = np.random.default_rng(1).integers(0, 2, (3, code.K)).astype(np.uint8)
    c = ldpc_encode(u, code)
    for i in range(3):
        assert np.array_equal(c[i], ldpc_encode(u[i], code))


def test_syndrome_examples():
    code = bundled_ldpc("r12", 27)
    assert syndrome(np.zeros(code.N, dtype=np.uint8), code.H)
    c = ldpc_encode(np.random.default_rng(0).integers(0, 2, code.K).astype(np.uint8), code)
    assert np.all(code.H.col_degrees > 0)
    for pos in (0, code.K, code.N - 1):
        d = c.copy()
        d[pos] ^= 1
        assert not syndrome(d, code.H)


def test_sparse_matrix_validation():
    with pytest.raises(ValueError):
        SparseParityMatrix.from_rows(3, [[0, 0]])
    with pytest.raises(ValueError):
        SparseParityMatrix.from_rows(3, [[5]])
    H = SparseParityMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    cp, edges = H.column_view
    assert cp.tolist() == [0, 1, 3, 4]
    assert H.col_idx[edges].tolist() == [0, 1, 1, 2]
