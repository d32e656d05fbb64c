import csv
import json

import pytest

from decbench.cli import EXIT_BANDS, EXIT_CONFIG, EXIT_OK, main, parse_sweep


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(l for l in fh if not l.startswith("#")))


def test_parse_sweep():
    assert parse_sweep("1:2:0.5") == (1.0, 1.5, 2.0)
    assert parse_sweep("0,1.5,3") == (0.0, 1.5, 3.0)
    with pytest.raises(ValueError):
        parse_sweep("2:1:0.5")
    with pytest.raises(ValueError):
        parse_sweep("a,b")


def test_ops_default_weights_pass(tmp_path, capsys):
    assert main(["ops", "--out", str(tmp_path), "--iters", "5"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out
    assert (tmp_path / "table2.csv").exists() and (tmp_path / "ops.manifest.json").exists()


def test_ops_custom_weights_recompute(tmp_path):
    w = json.loads(open(__import__("decbench.data", fromlist=["data_path"]).data_path("weights_default.json")).read())
    w["MAX2"] = "20"
    wp = tmp_path / "w.json"
    wp.write_text(json.dumps(w))
    # heavy compare-select units push the turbo and Viterbi figures out of their bands
    assert main(["ops", "--out", str(tmp_path / "o"), "--iters", "5", "--weights", str(wp)]) == EXIT_BANDS
    checks = rows(tmp_path / "o" / "table2_checks.csv")
    assert any(r["pass"] == "0" for r in checks)


def test_ops_bad_iterations(tmp_path):
    assert main(["ops", "--out", str(tmp_path), "--iters", "0"]) == EXIT_CONFIG


def test_eff_bundled(tmp_path):
    assert main(["eff", "--out", str(tmp_path)]) == EXIT_OK
    r = rows(tmp_path / "design_space.csv")
    assert len(r) >= 8
    assert float(r[0]["gops_mw"]) > 0
    assert main(["eff", "--out", str(tmp_path / "b"), "--metric", "bit"]) == EXIT_OK
    assert all(x["gops_mw"] == "" for x in rows(tmp_path / "b" / "design_space.csv"))


def test_eff_empty_records(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    assert main(["eff", "--out", str(tmp_path), "--records", str(p)]) == EXIT_CONFIG


def test_traj_wimedia_scenario_b(tmp_path):
    assert main(["traj", "--out", str(tmp_path), "--scenario", "b", "--iters", "5,2,1"]) == EXIT_OK
    r = rows(tmp_path / "trajectory_iterations_b.csv")
    assert sorted(float(x["throughput_mbps"]) for x in r) == [960, 2400, 4800]


def test_traj_scenario_a_constant_area(tmp_path):
    assert main(["traj", "--out", str(tmp_path), "--scenario", "a"]) == EXIT_OK
    r = rows(tmp_path / "trajectory_iterations_a.csv")
    assert len({x["area_eff_mbps_mm2"] for x in r}) == 1


def test_traj_rate(tmp_path):
    assert main(["traj", "--out", str(tmp_path), "--sweep", "rate", "--gnuplot"]) == EXIT_OK
    r = rows(tmp_path / "trajectory_rate.csv")
    assert len(r) == 3
    ee = [float(x["energy_eff_bit_nj"]) for x in r]
    ae = [float(x["area_eff_mbps_mm2"]) for x in r]
    assert ee == sorted(ee) and ae == sorted(ae)
    assert (tmp_path / "trajectory_rate.gp").exists()


def test_traj_bad_iterations(tmp_path):
    assert main(["traj", "--out", str(tmp_path), "--iters", "6,5"]) == EXIT_CONFIG


def test_fer_run_and_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"code": "ldpc-r34-z27", "ebno": "2:3:1", "stop_errors": 5, "max_frames": 64, "seed": 8}))
    out = tmp_path / "o"
    assert main(["fer", "--config", str(cfg), "--out", str(out), "--seed", "9", "--label", "t"]) == EXIT_OK
    man = json.loads((out / "fer.manifest.json").read_text())
    assert man["config"]["seed"] == 9 and man["config"]["code"] == "ldpc-r34-z27"
    assert (out / "t.curve.csv").exists() and (out / "t.manifest.json").exists()
    assert len(rows(out / "t.curve.csv")) == 2


def test_fer_config_errors(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["fer", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["fer", "--code", "ldpc-r13", "--kernel", "minsum", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["fer", "--code", "ldpc-r12", "--decoder", "viterbi", "--out", str(tmp_path)]) == EXIT_CONFIG
