"""Implementation records, the two efficiency metric systems, and design-space trajectories.

Units: throughput in Mbit/s, power in mW, area in mm^2.  Mbit/s divided by mW
is exactly bit/nJ, since (1e6 bit/s) / (1e-3 J/s) = 1e9 bit/J.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path

from decbench.data import data_path
from decbench.opmeter import NormalizedComplexity, gops


class RecordParseError(ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.path, self.line = path, line


class TrajectoryError(ValueError):
    pass


@dataclass(frozen=True)
class ThroughputEntry:
    mbps: float
    iterations: float | None = None
    rate: str | None = None  # kept as written ("1/2", "0.83") so CSV round-trips are lossless
    label: str = ""
    algorithm: str = ""

    @property
    def rate_value(self) -> float | None:
        return None if self.rate is None else float(Fraction(self.rate))


@dataclass(frozen=True)
class ImplRecord:
    name: str
    flexibility: str
    max_block_size: str
    entries: tuple[ThroughputEntry, ...]
    frequency_mhz: float
    area_mm2: float
    power_mw: float
    tech: str = "65nm"
    power_approx: bool = True
    postlayout: bool = True

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError(f"{self.name}: record needs at least one throughput entry")
        for q in (self.frequency_mhz, self.area_mm2, self.power_mw):
            if not q > 0:
                raise ValueError(f"{self.name}: physical quantities must be positive")
        for e in self.entries:
            if not e.mbps > 0:
                raise ValueError(f"{self.name}: throughput must be positive")

    def entry(self, key: str | None = None) -> ThroughputEntry:
        """Entry by label or rate string; the only entry when key is None."""
        if key is None:
            if len(self.entries) != 1:
                raise KeyError(f"{self.name} has {len(self.entries)} entries; name one")
            return self.entries[0]
        for e in self.entries:
            if key in (e.label, e.rate):
                return e
        raise KeyError(f"{self.name} has no entry {key!r}")


@dataclass(frozen=True)
class EffPoint:
    energy_eff: float  # bit/nJ
    area_eff: float  # Mbit/s/mm^2
    label: str = ""
    throughput_mbps: float = math.nan
    param: float | None = None
    gops_energy_eff: float | None = None  # GOPs/mW
    gops_area_eff: float | None = None  # GOPs/mm^2
    group: str = ""


@dataclass(frozen=True)
class Trajectory:
    points: tuple[EffPoint, ...]
    swept: str  # "iterations" or "code_rate"
    scenario: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise TrajectoryError("a trajectory needs at least 2 points")
        ps = [p.param for p in self.points]
        inc = all(a < b for a, b in zip(ps, ps[1:]))
        dec = all(a > b for a, b in zip(ps, ps[1:]))
        if not (inc or dec):
            raise TrajectoryError(f"swept {self.swept} is not monotone: {ps}")


class ScalingMode(str, Enum):
    POWER_GATING_LINEAR = "power_gating"
    FREQ_SCALING_LINEAR = "freq_scaling"
    VOLTAGE_SCALING = "voltage_scaling"


@dataclass(frozen=True)
class EnergyScalingModel:
    """Energy of running i of i_max iterations at fixed throughput, relative to i_max.

    Voltage mode assumes the clock is slowed to f = f_max * i / i_max and the
    supply follows it, v / v_max = (f / f_max) ** v_exponent, with E ~ v^2.
    """

    mode: ScalingMode = ScalingMode.POWER_GATING_LINEAR
    v_exponent: float = 1.0

    def multiplier(self, i: float, i_max: float) -> float:
        x = i / i_max
        if self.mode is ScalingMode.VOLTAGE_SCALING:
            return x * (x**self.v_exponent) ** 2
        return x


def energy_efficiency(record: ImplRecord, entry: ThroughputEntry) -> float:
    return entry.mbps / record.power_mw


def area_efficiency(record: ImplRecord, entry: ThroughputEntry) -> float:
    return entry.mbps / record.area_mm2


def gops_efficiency(record: ImplRecord, entry: ThroughputEntry, complexity: NormalizedComplexity) -> tuple[float, float]:
    g = gops(complexity, entry.mbps)
    return g / record.power_mw, g / record.area_mm2


def eff_point(record: ImplRecord, entry: ThroughputEntry, complexity: NormalizedComplexity | None = None, label=None) -> EffPoint:
    ge = ga = None
    if complexity is not None:
        ge, ga = gops_efficiency(record, entry, complexity)
    return EffPoint(
        energy_eff=energy_efficiency(record, entry),
        area_eff=area_efficiency(record, entry),
        label=label if label is not None else f"{record.name} {entry.label}".strip(),
        throughput_mbps=entry.mbps,
        gops_energy_eff=ge,
        gops_area_eff=ga,
        group=record.name,
    )


def derived_lambda3_record(flex: ImplRecord, factor: float = 1.10) -> ImplRecord:
    """The flexible LDPC decoder running the lambda-3 kernel: same throughput, area and power x factor."""
    entries = tuple(replace(e, algorithm="ldpc-lambda3") for e in flex.entries)
    return replace(
        flex,
        name=f"{flex.name} (lambda-3)",
        entries=entries,
        area_mm2=flex.area_mm2 * factor,
        power_mw=flex.power_mw * factor,
    )


def iteration_trajectory(record, entry_at_imax, iters_list, scenario: str = "a", model: EnergyScalingModel | None = None) -> Trajectory:
    """Trade iterations for efficiency.

    Scenario a keeps the throughput and spends the saved iterations on energy
    (per ``model``).  Scenario b runs at full utilization and turns them into
    throughput, so both efficiencies scale by i_max / i.  The scaling model
    only applies to scenario a.
    """
    model = model or EnergyScalingModel()
    i_max = entry_at_imax.iterations
    if i_max is None:
        raise ValueError(f"{record.name} entry has no iteration count")
    iters = [float(i) for i in iters_list]
    if not iters or iters[0] != i_max:
        raise ValueError(f"iteration list must start at i_max={i_max:g}")
    for i in iters:
        if i > i_max:
            raise ValueError(f"{i:g} iterations exceeds i_max={i_max:g}")
        if i <= 0:
            raise ValueError("iteration counts must be positive")
    if scenario not in ("a", "b"):
        raise ValueError(f"unknown scenario {scenario!r}")
    e0 = energy_efficiency(record, entry_at_imax)
    a0 = area_efficiency(record, entry_at_imax)
    pts = []
    for k, i in enumerate(iters, 1):
        if scenario == "a":
            tp, ae, ee = entry_at_imax.mbps, a0, e0 / model.multiplier(i, i_max)
        else:
            s = i_max / i
            tp, ae, ee = entry_at_imax.mbps * s, a0 * s, e0 * s
        pts.append(EffPoint(ee, ae, label=f"{k}{scenario}", throughput_mbps=tp, param=i, group=record.name))
    return Trajectory(tuple(pts), "iterations", scenario)


def rate_trajectory(records, lambda3: ImplRecord | None = None, threshold: float = 0.5) -> Trajectory:
    """One point per rate of the flexible LDPC decoder, ordered by rate.

    ``records`` is the flexible-LDPC record (or a list of its entries paired with
    it).  Rates below ``threshold`` are charged to the lambda-3 variant.
    """
    if isinstance(records, ImplRecord):
        base, entries = records, list(records.entries)
    else:
        pairs = list(records)
        base = pairs[0][0]
        entries = [e for _, e in pairs]
    rated = [e for e in entries if e.rate is not None]
    if len(rated) < 2:
        raise TrajectoryError("rate trajectory needs at least 2 rated entries")
    l3 = lambda3 or derived_lambda3_record(base)
    rated.sort(key=lambda e: (e.rate_value, e.iterations or 0))
    pts = []
    for k, e in enumerate(rated, 1):
        rec = l3 if e.rate_value < threshold else base
        p = eff_point(rec, e, label=str(k))
        pts.append(replace(p, param=e.rate_value))
    return Trajectory(tuple(pts), "code_rate", "none")


# ---------------------------------------------------------------- CSV I/O

RECORD_COLUMNS = (
    "decoder",
    "flexibility",
    "max_block_size",
    "entry",
    "algorithm",
    "throughput_mbps",
    "iterations",
    "rate",
    "frequency_mhz",
    "area_mm2",
    "power_mw",
    "power_approx",
    "postlayout",
    "tech",
)

EXPORT_COLUMNS = ("label", "area_eff_mbps_mm2", "energy_eff_bit_nj", "gops_mw", "gops_mm2", "param", "scenario")


def _num(s: str) -> float:
    return float(s)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(int(x)) if x.is_integer() else repr(x)
    return str(x)


def parse_records(text: str, path="<string>") -> tuple[list[ImplRecord], list[str]]:
    """Parse the record CSV; returns (records, leading comment lines)."""
    comments: list[str] = []
    body: list[tuple[int, str]] = []
    for n, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            comments.append(line)
        elif line.strip():
            body.append((n, line))
    if not body:
        raise RecordParseError(path, 1, "no header row")
    hdr_line, hdr = body[0]
    header = next(csv.reader([hdr]))
    if tuple(header) != RECORD_COLUMNS:
        raise RecordParseError(path, hdr_line, f"unexpected header {header}")
    groups: dict[str, dict] = {}
    for n, line in body[1:]:
        row = next(csv.reader([line]))
        if len(row) != len(RECORD_COLUMNS):
            raise RecordParseError(path, n, f"expected {len(RECORD_COLUMNS)} fields, got {len(row)}")
        r = dict(zip(RECORD_COLUMNS, row))
        try:
            entry = ThroughputEntry(
                mbps=_num(r["throughput_mbps"]),
                iterations=_num(r["iterations"]) if r["iterations"] else None,
                rate=r["rate"] or None,
                label=r["entry"],
                algorithm=r["algorithm"],
            )
            if entry.rate is not None:
                entry.rate_value
            phys = dict(
                name=r["decoder"],
                flexibility=r["flexibility"],
                max_block_size=r["max_block_size"],
                frequency_mhz=_num(r["frequency_mhz"]),
                area_mm2=_num(r["area_mm2"]),
                power_mw=_num(r["power_mw"]),
                tech=r["tech"],
                power_approx=r["power_approx"] == "1",
                postlayout=r["postlayout"] == "1",
            )
        except (ValueError, ZeroDivisionError) as e:
            raise RecordParseError(path, n, str(e)) from None
        g = groups.setdefault(r["decoder"], {"phys": phys, "entries": [], "line": n})
        if g["phys"] != phys:
            raise RecordParseError(path, n, f"decoder {r['decoder']!r} changes its physical data between rows")
        g["entries"].append(entry)
    if not groups:
        raise RecordParseError(path, hdr_line, "no records")
    out = []
    for g in groups.values():
        try:
            out.append(ImplRecord(entries=tuple(g["entries"]), **g["phys"]))
        except ValueError as e:
            raise RecordParseError(path, g["line"], str(e)) from None
    return out, comments


def load_records(path=None) -> list[ImplRecord]:
    path = Path(path) if path is not None else data_path("reference_decoders.csv")
    return parse_records(path.read_text(), path)[0]


def format_records(records, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(c.rstrip("\n") + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        for e in r.entries:
            w.writerow(
                [
                    r.name,
                    r.flexibility,
                    r.max_block_size,
                    e.label,
                    e.algorithm,
                    _fmt(e.mbps),
                    _fmt(e.iterations),
                    e.rate or "",
                    _fmt(r.frequency_mhz),
                    _fmt(r.area_mm2),
                    _fmt(r.power_mw),
                    _fmt(r.power_approx),
                    _fmt(r.postlayout),
                    r.tech,
                ]
            )
    return buf.getvalue()


def write_records(records, path, comments=()):
    Path(path).write_text(format_records(records, comments))


def format_design_space(points, scenario: str = "none") -> str:
    buf = io.StringIO()
    buf.write("# log-log axes: x=area_eff_mbps_mm2, y=energy_eff_bit_nj (or gops_mm2 / gops_mw)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPORT_COLUMNS)
    for p in points:
        w.writerow(
            [
                p.label,
                f"{p.area_eff:.6g}",
                f"{p.energy_eff:.6g}",
                "" if p.gops_energy_eff is None else f"{p.gops_energy_eff:.6g}",
                "" if p.gops_area_eff is None else f"{p.gops_area_eff:.6g}",
                "" if p.param is None else f"{p.param:.6g}",
                scenario,
            ]
        )
    return buf.getvalue()


def export_design_space(points, path, scenario: str = "none"):
    if isinstance(points, Trajectory):
        scenario, points = points.scenario, points.points
    Path(path).write_text(format_design_space(points, scenario))


# ---------------------------------------------------------------- design space

# normalized ops per information bit per algorithm, from the published complexity table;
# LDPC values are per iteration and divided by R at use
PAPER_OPS = {
    "viterbi": 200.0,
    "turbo-maxlog": 140.0,  # per full iteration
    "ldpc-minsum": 15.0,  # per iteration, times 1/R
}
LAMBDA3_OPS_RATIO = 3.3


def paper_complexity(entry: ThroughputEntry, lambda3_ratio: float = LAMBDA3_OPS_RATIO) -> NormalizedComplexity:
    """Published ops/bit for an entry's algorithm and operating point.

    Entries without an iteration count (turbo on the ASIP) fall back to 1 iteration.
    """
    alg = entry.algorithm
    it = entry.iterations or 1.0
    if alg == "viterbi":
        return NormalizedComplexity(PAPER_OPS["viterbi"])
    if alg == "turbo-maxlog":
        return NormalizedComplexity(PAPER_OPS["turbo-maxlog"] * it)
    if alg in ("ldpc-minsum", "ldpc-lambda3"):
        r = entry.rate_value or 0.5
        ops = PAPER_OPS["ldpc-minsum"] * it / r
        if alg == "ldpc-lambda3":
            ops *= lambda3_ratio
        return NormalizedComplexity(ops)
    raise ValueError(f"no complexity figure for algorithm {alg!r}")


def design_space(records, complexity_of=paper_complexity, include_lambda3: bool = False) -> list[EffPoint]:
    """Every (record, entry) as a point carrying both metric systems."""
    recs = list(records)
    if not recs:
        raise ValueError("no implementation records")
    if include_lambda3:
        flex = [r for r in recs if r.name == "LDPC flexible"]
        recs += [derived_lambda3_record(r) for r in flex]
    return [eff_point(r, e, complexity_of(e)) for r in recs for e in r.entries]


def find_record(records, name: str) -> ImplRecord:
    for r in records:
        if r.name == name:
            return r
    raise KeyError(f"no record named {name!r}")
