import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from decbench.effspace import (
    EXPORT_COLUMNS,
    EffPoint,
    EnergyScalingModel,
    ImplRecord,
    RecordParseError,
    ScalingMode,
    ThroughputEntry,
    TrajectoryError,
    area_efficiency,
    derived_lambda3_record,
    design_space,
    energy_efficiency,
    eff_point,
    find_record,
    format_design_space,
    format_records,
    gops_efficiency,
    iteration_trajectory,
    load_records,
    paper_complexity,
    parse_records,
    rate_trajectory,
)
from decbench.data import data_path
from decbench.opmeter import NormalizedComplexity


@pytest.fixture(scope="module")
def recs():
    return load_records()


def rec(recs, name):
    return find_record(recs, name)


def test_bundled_file_has_five_decoders(recs):
    assert len(recs) == 5
    assert sum(len(r.entries) for r in recs) >= 8


def test_energy_efficiency_examples(recs):
    assert energy_efficiency(rec(recs, "CC Decoder"), rec(recs, "CC Decoder").entry()) == pytest.approx(13.51, abs=0.005)
    lte = rec(recs, "LTE turbo")
    assert energy_efficiency(lte, lte.entry()) == pytest.approx(0.50)
    wm = rec(recs, "LDPC WiMedia 1.5")
    assert energy_efficiency(wm, wm.entry("0.75")) == pytest.approx(4.97, abs=0.005)


def test_area_efficiency_examples(recs):
    assert area_efficiency(rec(recs, "CC Decoder"), rec(recs, "CC Decoder").entry()) == pytest.approx(5000)
    lte = rec(recs, "LTE turbo")
    assert area_efficiency(lte, lte.entry()) == pytest.approx(71.4, abs=0.05)
    flex = rec(recs, "LDPC flexible")
    assert area_efficiency(flex, flex.entry("0.83")) == pytest.approx(256.0, abs=0.05)


def test_gops_examples(recs):
    cc = rec(recs, "CC Decoder")
    g_mw, g_mm2 = gops_efficiency(cc, cc.entry(), NormalizedComplexity(200))
    assert g_mw == pytest.approx(2.70, abs=0.005) and g_mm2 == pytest.approx(1000)
    flex = rec(recs, "LDPC flexible")
    c = paper_complexity(flex.entry("1/2"))
    assert c.gops_at(100) == pytest.approx(60)
    assert gops_efficiency(cc, cc.entry(), NormalizedComplexity(0)) == (0, 0)


def test_gops_and_bit_metrics_invert_for_lambda3(recs):
    flex = rec(recs, "LDPC flexible")
    l3 = derived_lambda3_record(flex)
    e = flex.entry("1/2")
    ms = eff_point(flex, e, paper_complexity(e))
    la = eff_point(l3, l3.entry("1/2"), paper_complexity(l3.entry("1/2")))
    assert la.gops_energy_eff > 2.5 * ms.gops_energy_eff
    assert la.energy_eff < ms.energy_eff


def test_record_validation():
    e = ThroughputEntry(100, 5, "1/2", "x", "ldpc-minsum")
    with pytest.raises(ValueError):
        ImplRecord("x", "", 1, (), 100, 1, 1, "65nm")
    with pytest.raises(ValueError):
        ImplRecord("x", "", 1, (e,), 100, 0, 1, "65nm")


@given(st.floats(1, 1e4), st.floats(0.01, 10), st.floats(1, 1e3), st.floats(1, 4))
def test_efficiency_scaling(mbps, area, power, k):
    e = ThroughputEntry(mbps, None, "", "x", "viterbi")
    r = ImplRecord("x", "", 1, (e,), 100, area, power, "65nm")
    e2 = ThroughputEntry(mbps * k, None, "", "x", "viterbi")
    r2 = ImplRecord("x", "", 1, (e2,), 100, area, power, "65nm")
    assert energy_efficiency(r2, e2) == pytest.approx(k * energy_efficiency(r, e))
    assert area_efficiency(r2, e2) == pytest.approx(k * area_efficiency(r, e))


def test_iteration_trajectory_scenario_b(recs):
    wm = rec(recs, "LDPC WiMedia 1.5")
    t = iteration_trajectory(wm, wm.entry("0.75"), [5, 2, 1], "b")
    tp = [p.throughput_mbps for p in t.points]
    assert sorted(tp) == pytest.approx([960, 2400, 4800])
    assert max(tp) / min(tp) == pytest.approx(5)
    full = [p for p in t.points if p.param == 5][0]
    one = [p for p in t.points if p.param == 1][0]
    assert one.area_eff == pytest.approx(5 * full.area_eff)
    assert one.energy_eff == pytest.approx(5 * full.energy_eff)


def test_iteration_trajectory_scenario_a(recs):
    wm = rec(recs, "LDPC WiMedia 1.5")
    e = wm.entry("0.75")
    base = eff_point(wm, e)
    t = iteration_trajectory(wm, e, [5, 4, 2], "a")
    at_max = [p for p in t.points if p.param == 5][0]
    assert at_max.energy_eff == pytest.approx(base.energy_eff) and at_max.area_eff == pytest.approx(base.area_eff)
    for p in t.points:
        assert p.area_eff == pytest.approx(base.area_eff)
        assert p.energy_eff == pytest.approx(base.energy_eff * 5 / p.param)


def test_voltage_scaling_is_superlinear():
    lin = EnergyScalingModel(ScalingMode.POWER_GATING_LINEAR)
    v = EnergyScalingModel(ScalingMode.VOLTAGE_SCALING)
    assert lin.multiplier(2, 5) == pytest.approx(0.4)
    assert v.multiplier(5, 5) == pytest.approx(1)
    assert v.multiplier(2, 5) < lin.multiplier(2, 5)


def test_iteration_trajectory_preconditions(recs):
    wm = rec(recs, "LDPC WiMedia 1.5")
    with pytest.raises(ValueError):
        iteration_trajectory(wm, wm.entry("0.75"), [6, 5], "a")
    with pytest.raises((ValueError, TrajectoryError)):
        iteration_trajectory(wm, wm.entry("0.75"), [5], "a")


def test_rate_trajectory(recs):
    flex = rec(recs, "LDPC flexible")
    t = rate_trajectory(flex)
    ee = [p.energy_eff for p in t.points]
    ae = [p.area_eff for p in t.points]
    assert np.all(np.diff(ee) > 0) and np.all(np.diff(ae) > 0)
    rev = ImplRecord(flex.name, flex.flexibility, flex.max_block_size, tuple(reversed(flex.entries)),
                     flex.frequency_mhz, flex.area_mm2, flex.power_mw, flex.tech)
    assert [(p.param, p.energy_eff) for p in rate_trajectory(rev).points] == [(p.param, p.energy_eff) for p in t.points]
    one = ImplRecord("x", "", 1, (flex.entries[0],), 100, 1, 1, "65nm")
    with pytest.raises((ValueError, TrajectoryError)):
        rate_trajectory(one)


def test_records_round_trip():
    text = data_path("reference_decoders.csv").read_text()
    recs, comments = parse_records(text)
    assert format_records(recs, comments) == text


def test_malformed_row_reports_line():
    text = data_path("reference_decoders.csv").read_text().splitlines()
    header = next(i for i, l in enumerate(text) if not l.startswith("#"))
    text.insert(header + 2, "broken,row")
    with pytest.raises(RecordParseError) as e:
        parse_records("\n".join(text) + "\n", "x.csv")
    assert e.value.line == header + 3
    with pytest.raises(RecordParseError):
        parse_records("")


def test_design_space_export(recs):
    pts = design_space(recs)
    assert len({p.group for p in pts}) == 5
    assert len({p.group for p in design_space(recs, include_lambda3=True)}) == 6
    out = format_design_space(pts).splitlines()
    header = [l for l in out if not l.startswith("#")][0]
    assert header == ",".join(EXPORT_COLUMNS)
    assert isinstance(pts[0], EffPoint)
