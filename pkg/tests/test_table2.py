from fractions import Fraction

import pytest

from decbench.opmeter import OpKind, OpWeightTable
from decbench.table2 import BANDS, reproduce_table2


@pytest.fixture(scope="module")
def report():
    return reproduce_table2()


def test_all_bands_pass_with_default_weights(report):
    failed = [c.name for c in report.checks if not c.passed]
    assert not failed


def test_exact_iteration_ratios(report):
    ratios = {c.name: c.value for c in report.checks if c.name.endswith("iteration ratio")}
    assert ratios and all(isinstance(v, Fraction) for v in ratios.values())
    assert ratios["turbo 6/2 iteration ratio"] == 3
    assert all(v == 8 for k, v in ratios.items() if "40/5" in k)


def test_rows_and_csv(report):
    row = report.find("cc-r12", "viterbi-64")
    assert BANDS["viterbi"][0] <= row.measured_ops_bit <= BANDS["viterbi"][1]
    lines = report.to_csv().splitlines()
    assert lines[0] == "code,algorithm,iterations,rate,measured_ops_bit,paper_ops_bit,rel_err"
    # 1 viterbi + 3 turbo + 4 codes x 4 iteration counts x 2 kernels
    assert len(lines) == 1 + 1 + 3 + 32


def test_custom_weights_recompute(report):
    heavy = OpWeightTable.from_mapping({k.name: (4 if k == OpKind.MAX2 else 1) for k in OpKind})
    other = reproduce_table2(heavy, ldpc_iters=(5,))
    assert other.find("cc-r12", "viterbi-64").measured_ops_bit != report.find("cc-r12", "viterbi-64").measured_ops_bit
    # ratios of same-algorithm ledgers survive a weight change
    assert [c.value for c in other.checks if "6/2" in c.name] == [3]


def test_bad_iterations():
    with pytest.raises(ValueError):
        reproduce_table2(ldpc_iters=(0,))
