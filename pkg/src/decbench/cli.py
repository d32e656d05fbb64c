"""decbench command line: fer, ops, eff and traj subcommands.

Settings come from built-in defaults, then an optional JSON file (--config),
then explicit flags.  Every run writes <out>/<subcommand>.manifest.json with
the fully resolved settings, from which all outputs can be regenerated.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from decbench import __version__

EXIT_OK, EXIT_CONFIG, EXIT_BANDS = 0, 2, 3

DEFAULTS = {
    "common": {"seed": 0, "out": "decbench-out", "threads": 1, "gnuplot": False},
    "fer": {
        "code": "ldpc-r34",
        "decoder": "ldpc",
        "kernel": "minsum",
        "alpha": 0.75,
        "iters": 5,
        "ebno": "2:4:0.5",
        "stop_errors": 100,
        "max_frames": 1_000_000,
        "all_zero": False,
        "modulation": "BPSK",
        "allow_kernel_override": False,
        "label": "",
    },
    "ops": {"weights": None, "iters": "5,10,20,40", "K": 1024},
    "eff": {"records": None, "metric": "both", "with_lambda3": False},
    "traj": {
        "records": None,
        "sweep": "iterations",
        "scenario": "b",
        "record": "LDPC WiMedia 1.5",
        "entry": "0.75",
        "iters": "5,2,1",
        "scaling": "power_gating",
        "v_exponent": 1.0,
    },
}


class CliConfigError(ValueError):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="decbench", description="Channel-decoder complexity and efficiency bench")
    ap.add_argument("--version", action="version", version=f"decbench {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        # defaults are None so explicit flags can be told apart from config-file values
        p.add_argument("--config", help="JSON file with settings (flags win)")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int)
        p.add_argument("--gnuplot", action="store_const", const=True, help="also write a gnuplot script")

    p = sub.add_parser("fer", help="Monte-Carlo FER/BER curve")
    common(p)
    p.add_argument("--code", help="code id, e.g. ldpc-r12, turbo-r13-k1024, cc-r34")
    p.add_argument("--decoder", choices=["viterbi", "turbo", "ldpc", "uncoded"])
    p.add_argument("--kernel", choices=["minsum", "lambda3"])
    p.add_argument("--alpha", type=float, help="Min-Sum scaling factor")
    p.add_argument("--iters", type=float, help="LDPC max iterations or turbo iterations")
    p.add_argument("--ebno", help="sweep a:b:step in dB (inclusive) or a comma list")
    p.add_argument("--stop-errors", dest="stop_errors", type=int)
    p.add_argument("--max-frames", dest="max_frames", type=int)
    p.add_argument("--modulation", choices=["BPSK", "16QAM"])
    p.add_argument("--all-zero", dest="all_zero", action="store_const", const=True)
    p.add_argument("--allow-kernel-override", dest="allow_kernel_override", action="store_const", const=True)
    p.add_argument("--label")

    p = sub.add_parser("ops", help="measured vs published operations per bit")
    common(p)
    p.add_argument("--weights", help="JSON weight table")
    p.add_argument("--iters", help="comma list of LDPC iteration counts to report")
    p.add_argument("--K", type=int, help="turbo/convolutional block length")

    p = sub.add_parser("eff", help="design-space points for all records")
    common(p)
    p.add_argument("--records", help="implementation record CSV (default: bundled)")
    p.add_argument("--metric", choices=["bit", "gops", "both"])
    p.add_argument("--with-lambda3", dest="with_lambda3", action="store_const", const=True,
                   help="add the derived lambda-3 variant of the flexible LDPC decoder")

    p = sub.add_parser("traj", help="iteration or code-rate trajectory")
    common(p)
    p.add_argument("--records")
    p.add_argument("--sweep", choices=["iterations", "rate"])
    p.add_argument("--scenario", choices=["a", "b"])
    p.add_argument("--record", help="record name for the iteration sweep")
    p.add_argument("--entry", help="entry label or rate at i_max")
    p.add_argument("--iters", help="comma list, descending from i_max")
    p.add_argument("--scaling", choices=["power_gating", "freq_scaling", "voltage_scaling"])
    p.add_argument("--v-exponent", dest="v_exponent", type=float)
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[args.cmd])
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise CliConfigError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise CliConfigError("config file must hold a JSON object")
        unknown = set(data) - set(cfg)
        if unknown:
            raise CliConfigError(f"unknown config keys {sorted(unknown)}")
        cfg.update(data)
    for k, v in vars(args).items():
        if k in ("cmd", "config") or v is None:
            continue
        cfg[k] = v
    if cfg["threads"] < 1:
        raise CliConfigError("--threads must be >= 1")
    return cfg


def parse_sweep(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    s = str(text).strip()
    try:
        if ":" in s:
            a, b, step = (float(x) for x in s.split(":"))
            if step <= 0 or b < a:
                raise CliConfigError(f"bad sweep {s!r}")
            n = int(round((b - a) / step))
            vals = [round(a + i * step, 10) for i in range(n + 1)]
            return tuple(v for v in vals if v <= b + 1e-9)
        return tuple(float(x) for x in s.split(","))
    except ValueError:
        raise CliConfigError(f"bad sweep {s!r}") from None


def _int_list(text, what) -> list[int]:
    vals = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        out = [int(float(x)) for x in vals]
    except ValueError:
        raise CliConfigError(f"bad {what} list {text!r}") from None
    return out


def _write_manifest(out: Path, cmd: str, cfg: dict, files: list[str], extra=None):
    man = {"tool": "decbench", "version": __version__, "subcommand": cmd, "config": cfg, "outputs": sorted(files)}
    if extra:
        man.update(extra)
    (out / f"{cmd}.manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True, default=str) + "\n")


def _gnuplot(path: Path, data: str, xcol: int, ycol: int, xlabel: str, ylabel: str, logscale: bool):
    lines = [
        "set datafile separator ','",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    if logscale:
        lines.append("set logscale xy")
    lines.append(f"plot '{data}' every ::1 using {xcol}:{ycol}:1 with labels point pt 7 offset 1,1 notitle")
    path.write_text("\n".join(lines) + "\n")


def cmd_fer(cfg: dict) -> int:
    from decbench.harness import Experiment, run_experiment

    e = Experiment(
        code=cfg["code"],
        decoder=cfg["decoder"],
        ebno_db=parse_sweep(cfg["ebno"]),
        iterations=cfg["iters"],
        kernel=cfg["kernel"],
        alpha=cfg["alpha"],
        modulation=cfg["modulation"],
        min_frame_errors=cfg["stop_errors"],
        max_frames=cfg["max_frames"],
        seed=cfg["seed"],
        label=cfg["label"],
        all_zero=bool(cfg["all_zero"]),
        allow_kernel_override=bool(cfg["allow_kernel_override"]),
    )
    out = Path(cfg["out"])
    res = run_experiment(e, out_dir=out, threads=cfg["threads"])
    files = [v for v in res.manifest["files"].values() if (out / v).exists()]
    if cfg["gnuplot"]:
        gp = f"{e.name}.gp"
        (out / gp).write_text(
            "set datafile separator ','\nset logscale y\nset xlabel 'Eb/N0 [dB]'\nset ylabel 'FER'\n"
            f"plot '{e.name}.curve.csv' every ::1 using 1:5 with linespoints title '{e.name}'\n"
        )
        files.append(gp)
    _write_manifest(out, "fer", cfg, files, {"experiment_hash": e.config_hash()})
    for p in res.curve.points:
        print(f"{p.ebno_db:7.3f} dB  frames {p.frames:8d}  FER {p.fer:.3e}  BER {p.ber:.3e}")
    return EXIT_OK


def cmd_ops(cfg: dict) -> int:
    from decbench import table2
    from decbench.opmeter import OpWeightTable, WeightTableError

    iters = _int_list(cfg["iters"], "iteration")
    if not iters or any(i < 1 for i in iters):
        raise CliConfigError("--iters values must be positive integers")
    if cfg["K"] < 40:
        raise CliConfigError("--K must be a supported turbo block length")
    try:
        weights = OpWeightTable.load(cfg["weights"]) if cfg["weights"] else None
    except (OSError, WeightTableError) as e:
        raise CliConfigError(str(e)) from None
    rep = table2.reproduce_table2(weights, K=cfg["K"], seed=cfg["seed"], ldpc_iters=iters)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "table2.csv").write_text(rep.to_csv())
    (out / "table2_checks.csv").write_text(rep.checks_csv())
    _write_manifest(out, "ops", cfg, ["table2.csv", "table2_checks.csv"])
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {float(c.value):.4g} in [{c.lo:g}, {c.hi:g}]")
    return EXIT_OK if rep.passed else EXIT_BANDS


def _records(cfg):
    from decbench.effspace import RecordParseError, load_records

    try:
        return load_records(cfg["records"])
    except (OSError, RecordParseError) as e:
        raise CliConfigError(str(e)) from None


def cmd_eff(cfg: dict) -> int:
    from decbench.effspace import design_space, format_design_space

    recs = _records(cfg)
    pts = design_space(recs, include_lambda3=bool(cfg["with_lambda3"]))
    if cfg["metric"] == "bit":
        pts = [replace(p, gops_energy_eff=None, gops_area_eff=None) for p in pts]
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "design_space.csv").write_text(format_design_space(pts))
    files = ["design_space.csv"]
    if cfg["gnuplot"]:
        if cfg["metric"] == "gops":
            _gnuplot(out / "design_space.gp", "design_space.csv", 5, 4, "GOPs/mm^2", "GOPs/mW", True)
        else:
            _gnuplot(out / "design_space.gp", "design_space.csv", 2, 3, "Mbit/s/mm^2", "bit/nJ", True)
        files.append("design_space.gp")
    _write_manifest(out, "eff", cfg, files)
    groups = sorted({p.group for p in pts})
    print(f"{len(pts)} points in {len(groups)} groups -> {out / 'design_space.csv'}")
    return EXIT_OK


def cmd_traj(cfg: dict) -> int:
    from decbench.effspace import (
        EnergyScalingModel,
        ScalingMode,
        find_record,
        format_design_space,
        iteration_trajectory,
        rate_trajectory,
    )

    recs = _records(cfg)
    try:
        if cfg["sweep"] == "rate":
            traj = rate_trajectory(find_record(recs, "LDPC flexible"))
        else:
            rec = find_record(recs, cfg["record"])
            model = EnergyScalingModel(ScalingMode(cfg["scaling"]), cfg["v_exponent"])
            iters = _int_list(cfg["iters"], "iteration")
            traj = iteration_trajectory(rec, rec.entry(cfg["entry"]), iters, cfg["scenario"], model)
    except KeyError as e:
        raise CliConfigError(str(e.args[0])) from None
    text = format_design_space(traj.points, traj.scenario)
    # append the throughput column to the fixed design-space schema
    lines = text.splitlines()
    body = [lines[0], lines[1] + ",throughput_mbps"]
    body += [ln + f",{p.throughput_mbps:.6g}" for ln, p in zip(lines[2:], traj.points)]
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    name = f"trajectory_{cfg['sweep']}" + (f"_{cfg['scenario']}" if cfg["sweep"] == "iterations" else "") + ".csv"
    (out / name).write_text("\n".join(body) + "\n")
    files = [name]
    if cfg["gnuplot"]:
        gp = name[:-4] + ".gp"
        _gnuplot(out / gp, name, 2, 3, "Mbit/s/mm^2", "bit/nJ", True)
        files.append(gp)
    _write_manifest(out, "traj", cfg, files)
    for p in traj.points:
        print(f"{p.label:>3}  param {p.param:<6g} {p.throughput_mbps:9.1f} Mbit/s  {p.area_eff:10.2f} Mbit/s/mm2  {p.energy_eff:8.4f} bit/nJ")
    return EXIT_OK


COMMANDS = {"fer": cmd_fer, "ops": cmd_ops, "eff": cmd_eff, "traj": cmd_traj}


def main(argv=None) -> int:
    from decbench.harness import ConfigError
    from decbench.effspace import TrajectoryError

    args = _parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.cmd](cfg)
    except (CliConfigError, ConfigError, TrajectoryError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
