import pytest

from decbench.codes.qpp import (
    UnsupportedBlockLength,
    is_bijection,
    next_supported_length,
    qpp_coefficients,
    qpp_permutation,
    qpp_permute,
    qpp_table,
    supported_lengths,
)
from oracles import qpp_naive


def test_table_size_and_ends():
    t = qpp_table()
    assert len(t) == 188
    assert t[40] == (3, 10)
    assert t[6144] == (263, 480)
    assert min(t) == 40 and max(t) == 6144


def test_examples():
    assert qpp_permute(0, 40) == 0
    assert qpp_permute(1, 40, 3, 10) == 13
    assert sorted(qpp_permutation(40, 3, 10)) == list(range(40))


def test_every_bundled_length_is_a_bijection():
    for K, (f1, f2) in qpp_table().items():
        perm = qpp_permutation(K, f1, f2)
        assert is_bijection(perm)
        assert sorted(perm.tolist()) == list(range(K))


def test_permutation_matches_definition():
    for K in (40, 1024, 6144):
        f1, f2 = qpp_coefficients(K)
        assert qpp_permutation(K).tolist() == qpp_naive(K, f1, f2)


def test_unsupported_lengths():
    with pytest.raises(UnsupportedBlockLength):
        qpp_coefficients(6140)
    with pytest.raises(UnsupportedBlockLength):
        qpp_permute(1, 41)
    with pytest.raises(IndexError):
        qpp_permute(40, 40)
    assert next_supported_length(6140) == 6144
    assert next_supported_length(1024) == 1024
    assert 1024 in supported_lengths()
