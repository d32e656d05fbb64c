"""Monte-Carlo FER experiments, curve persistence and curve comparison.

Frame ``i`` of every Eb/N0 point draws its message and noise from
``frame_rng(seed, i)``, so points share random numbers (common random numbers)
and the result never depends on the number of worker threads.  Frames are
decoded in fixed-size batches; batches are folded in index order and a point
stops after the first batch at which the stop rule holds.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from decbench import __version__
from decbench.channel import (
    MODULATIONS,
    bpsk_map,
    ebno_to_sigma,
    frame_rng,
    qam16_demap,
    qam16_map,
    quantized_llr,
    transmit,
)
from decbench.codes.conv import conv_encode
from decbench.codes.qc import ldpc_encode
from decbench.codes.registry import ResolvedCode, UnknownCode, resolve_code
from decbench.codes.turbo import turbo_encode, turbo_multiplex
from decbench.decoders.ldpc import CheckNodeKernel, Kernel, LdpcDecoder
from decbench.decoders.turbo import TurboDecoder, TurboIterCount
from decbench.decoders.viterbi import viterbi_decode
from decbench.fixedpoint import LlrFormat, quantize, scale_factor_q8
from decbench.opmeter import OpLedger, merge_all


class ConfigError(ValueError):
    pass


class InsufficientData(ValueError):
    pass


class NoMatch(ValueError):
    pass


DECODERS = ("viterbi", "turbo", "ldpc", "uncoded")
LAMBDA_RULE_RATE = Fraction(1, 2)


@dataclass(frozen=True)
class Experiment:
    code: str
    decoder: str
    ebno_db: tuple
    iterations: float = 1  # LDPC max iterations, turbo full iterations (multiples of 0.5)
    kernel: str = "minsum"
    alpha: float = 0.75  # Min-Sum scaling
    turbo_scale: float = 0.75
    early_stop: bool = True
    modulation: str = "BPSK"
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    seed: int = 0
    label: str = ""
    all_zero: bool = False
    batch_frames: int = 64
    llr_bits: int = 6
    llr_frac_bits: int = 2
    allow_kernel_override: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ebno_db", tuple(float(x) for x in self.ebno_db))

    @property
    def name(self) -> str:
        return self.label or f"{self.code}-{self.decoder}"

    @property
    def fmt(self) -> LlrFormat:
        return LlrFormat(self.llr_bits, self.llr_frac_bits)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ebno_db"] = [_fmt_ebno(x) for x in self.ebno_db]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Experiment":
        d = dict(d)
        d["ebno_db"] = tuple(float(x) for x in d["ebno_db"])
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown experiment fields {sorted(extra)}")
        return cls(**d)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class FerPoint:
    ebno_db: float
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    info_bits: int = 0  # bits per frame
    iters_hist: dict = field(default_factory=dict)  # stage -> frames that stopped there
    # per-stage error counts (stage = LDPC iteration or turbo half-iteration, 0 = before decoding)
    stage_frame_errors: list = field(default_factory=list)
    stage_bit_errors: list = field(default_factory=list)

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else math.nan

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.info_bits) if self.frames else math.nan

    def mean_stage(self) -> float:
        n = sum(self.iters_hist.values())
        return sum(k * v for k, v in self.iters_hist.items()) / n if n else 0.0

    def fer_interval(self, z: float = 1.96) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames, z)


@dataclass
class FerCurve:
    label: str
    points: list = field(default_factory=list)
    stage_unit: float = 1.0  # iterations per stage (0.5 for turbo)

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.ebno_db)

    def ebno(self) -> np.ndarray:
        return np.array([p.ebno_db for p in self.points])

    def fer(self) -> np.ndarray:
        return np.array([p.fer for p in self.points])

    def at_stage(self, stage: int, label: str | None = None) -> "FerCurve":
        """The curve a decoder stopped after ``stage`` would have produced on the same frames."""
        pts = []
        for p in self.points:
            if stage >= len(p.stage_frame_errors):
                raise ValueError(f"stage {stage} was not recorded")
            pts.append(FerPoint(p.ebno_db, p.frames, p.stage_frame_errors[stage], p.stage_bit_errors[stage], p.info_bits))
        return FerCurve(label or f"{self.label}@{stage * self.stage_unit:g}", pts, self.stage_unit)

    def stages(self) -> int:
        return min((len(p.stage_frame_errors) for p in self.points), default=0) - 1


@dataclass
class RunResult:
    experiment: Experiment
    curve: FerCurve
    ledgers: dict  # ebno -> OpLedger
    manifest: dict

    @property
    def ledger(self) -> OpLedger:
        return merge_all(self.ledgers.values())


def wilson_interval(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    c = (p + z * z / (2 * n)) / den
    h = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, c - h), min(1.0, c + h)


def intervals_disjoint(a: FerPoint, b: FerPoint, z: float = 1.96) -> bool:
    la, ha = a.fer_interval(z)
    lb, hb = b.fer_interval(z)
    return ha < lb or hb < la


def monotonicity_violations(curve: FerCurve, z: float = 1.96) -> list[tuple[float, float]]:
    """Adjacent Eb/N0 pairs where FER rises with confidence (disjoint intervals)."""
    out = []
    for a, b in zip(curve.points, curve.points[1:]):
        if b.fer > a.fer and intervals_disjoint(a, b, z):
            out.append((a.ebno_db, b.ebno_db))
    return out


def iteration_monotonicity_violations(curve: FerCurve, z: float = 1.96) -> list[tuple[float, int]]:
    """(Eb/N0, stage) where more decoding stages gave a confidently higher FER."""
    out = []
    for p in curve.points:
        for s in range(1, len(p.stage_frame_errors)):
            a = FerPoint(p.ebno_db, p.frames, p.stage_frame_errors[s - 1], 0, p.info_bits)
            b = FerPoint(p.ebno_db, p.frames, p.stage_frame_errors[s], 0, p.info_bits)
            if b.fer > a.fer and intervals_disjoint(a, b, z):
                out.append((p.ebno_db, s))
    return out


# ---------------------------------------------------------------- validation


def _family_ok(rc: ResolvedCode, decoder: str) -> bool:
    return {"viterbi": "conv", "turbo": "turbo", "ldpc": "ldpc", "uncoded": "uncoded"}[decoder] == rc.family


def validate_experiment(e: Experiment) -> ResolvedCode:
    if e.decoder not in DECODERS:
        raise ConfigError(f"unknown decoder {e.decoder!r}")
    try:
        rc = resolve_code(e.code)
    except (UnknownCode, OSError, ValueError) as err:
        raise ConfigError(str(err)) from None
    if not _family_ok(rc, e.decoder):
        raise ConfigError(f"decoder {e.decoder} cannot decode {rc.family} code {e.code}")
    if e.modulation not in MODULATIONS:
        raise ConfigError(f"unknown modulation {e.modulation!r}")
    if not e.ebno_db:
        raise ConfigError("empty Eb/N0 sweep")
    if any(not (b > a) for a, b in zip(e.ebno_db, e.ebno_db[1:])):
        raise ConfigError("Eb/N0 sweep must be strictly increasing")
    if any(math.isnan(x) for x in e.ebno_db):
        raise ConfigError("Eb/N0 values must be numbers")
    if e.min_frame_errors < 1 or e.max_frames < 1 or e.batch_frames < 1:
        raise ConfigError("stop rule and batch size must be positive")
    try:
        e.fmt
    except ValueError as err:
        raise ConfigError(str(err)) from None
    if e.decoder == "ldpc":
        if int(e.iterations) != e.iterations or e.iterations < 1:
            raise ConfigError("LDPC iterations must be a positive integer")
        if e.kernel not in ("minsum", "lambda3"):
            raise ConfigError(f"unknown kernel {e.kernel!r}")
        if e.kernel == "minsum" and rc.rate < LAMBDA_RULE_RATE and not e.allow_kernel_override:
            raise ConfigError(
                f"rate {rc.rate} < 1/2 requires the lambda3 kernel (set allow_kernel_override to use minsum)"
            )
        try:
            scale_factor_q8(e.alpha)
        except ValueError as err:
            raise ConfigError(str(err)) from None
    if e.decoder == "turbo":
        if e.iterations * 2 != int(e.iterations * 2) or e.iterations < 0.5:
            raise ConfigError("turbo iterations must be a positive multiple of 0.5")
        try:
            scale_factor_q8(e.turbo_scale)
        except ValueError as err:
            raise ConfigError(str(err)) from None
    if e.modulation == "16QAM" and e.decoder != "uncoded" and e.all_zero:
        # all-zero equivalence needs a symmetric channel; Gray 16-QAM bit channels are not
        raise ConfigError("all-zero mode is only valid on BPSK")
    return rc


# ---------------------------------------------------------------- frame simulation


class _Sim:
    """Encoder, channel and decoder for one experiment; decoders are per thread."""

    def __init__(self, e: Experiment, rc: ResolvedCode):
        self.e, self.rc = e, rc
        self.fmt = e.fmt
        self.local = threading.local()
        code = rc.code
        if rc.family == "conv":
            self.K = 1024 if rc.K == 0 else rc.K
            self.rate = code.exact_rate(self.K)
            self.stages = 0
        elif rc.family == "turbo":
            self.K = code.K
            self.rate = code.exact_rate
            self.stages = int(round(e.iterations * 2))
        elif rc.family == "ldpc":
            self.K = code.K if hasattr(code, "K") else rc.K
            self.rate = rc.rate
            self.stages = int(e.iterations)
        else:
            self.K = rc.K
            self.rate = Fraction(1)
            self.stages = 0

    def _decoder(self):
        d = getattr(self.local, "dec", None)
        if d is None:
            e, code = self.e, self.rc.code
            if self.rc.family == "turbo":
                d = TurboDecoder(code, e.turbo_scale, self.fmt)
            elif self.rc.family == "ldpc":
                kern = CheckNodeKernel(Kernel(e.kernel), alpha=e.alpha)
                if hasattr(code, "H"):
                    d = LdpcDecoder.for_code(code, kern, fmt=self.fmt)
                else:
                    d = LdpcDecoder(code, kern, fmt=self.fmt)
            self.local.dec = d
        return d

    def encode(self, u: np.ndarray) -> np.ndarray:
        rc = self.rc
        if rc.family == "conv":
            return np.stack([conv_encode(row, rc.code, punctured=True) for row in u])
        if rc.family == "turbo":
            return np.stack([turbo_multiplex(*turbo_encode(row, rc.code), rc.code) for row in u])
        if rc.family == "ldpc":
            if hasattr(rc.code, "base_matrix"):
                return ldpc_encode(u, rc.code)
            raise ConfigError("random messages need an encodable code; use all_zero for raw parity-check matrices")
        return u.copy()

    def codeword_length(self) -> int:
        rc = self.rc
        if rc.family == "conv":
            return rc.code.transmitted_length(self.K)
        if rc.family == "turbo":
            return rc.code.transmitted_length
        if rc.family == "ldpc":
            return rc.code.N if hasattr(rc.code, "N") else rc.code.n
        return self.K

    def channel(self, c: np.ndarray, sigma: float, rngs) -> tuple[np.ndarray, np.ndarray]:
        """Per-frame noisy observation; returns (quantized LLR codes, real LLRs)."""
        e = self.e
        L = c.shape[1]
        q = np.empty(c.shape, dtype=np.int64)
        real = np.empty(c.shape, dtype=np.float64)
        for f, rng in enumerate(rngs):
            if e.modulation == "BPSK":
                y = transmit(bpsk_map(c[f]), sigma, rng)
                q[f] = quantized_llr(y, sigma, self.fmt)
                real[f] = y
            else:
                pad = (-L) % 4
                bits = np.concatenate([c[f], np.zeros(pad, dtype=np.uint8)])
                y = transmit(qam16_map(bits), sigma, rng)
                llr = qam16_demap(y, sigma) if sigma > 0 else np.where(bits == 0, np.inf, -np.inf)
                llr = llr[:L]
                real[f] = llr
                q[f] = quantize(np.clip(llr, -2 * self.fmt.max_value, 2 * self.fmt.max_value), self.fmt)
        return q, real

    def run_batch(self, start: int, n: int, sigma: float):
        e = self.e
        rngs = [frame_rng(e.seed, start + i) for i in range(n)]
        if e.all_zero:
            u = np.zeros((n, self.K), dtype=np.uint8)
            c = np.zeros((n, self.codeword_length()), dtype=np.uint8)
        else:
            u = np.stack([rng.integers(0, 2, self.K, dtype=np.uint8) for rng in rngs])
            c = self.encode(u)
        q, real = self.channel(c, sigma, rngs)
        fam = self.rc.family
        if fam == "uncoded":
            hard = (real < 0).astype(np.uint8)
            err = (hard != u).sum(axis=1)
            return err, None, np.zeros(n, dtype=np.int64), OpLedger()
        if fam == "conv":
            res = viterbi_decode(q, self.rc.code, self.K)
            err = (res.bits != u).sum(axis=1)
            return err, None, np.zeros(n, dtype=np.int64), res.ledger
        dec = self._decoder()
        if fam == "turbo":
            res = dec.decode(q, TurboIterCount(self.stages), e.early_stop, reference=u)
            err = (res.bits != u).sum(axis=1)
            return err, res.info_errors, res.half_iterations_used, res.ledger
        res = dec.decode(q, self.stages, e.early_stop, reference=u)
        err = (res.bits[:, : self.K] != u).sum(axis=1)
        return err, res.info_errors, res.iterations_used, res.ledger


def _fold(point: FerPoint, batch, stages: int):
    err, stage_err, used, _ = batch
    point.frames += err.size
    point.frame_errors += int(np.count_nonzero(err))
    point.bit_errors += int(err.sum())
    if stage_err is not None:
        if not point.stage_frame_errors:
            point.stage_frame_errors = [0] * (stages + 1)
            point.stage_bit_errors = [0] * (stages + 1)
        for s in range(stages + 1):
            col = stage_err[:, s]
            point.stage_frame_errors[s] += int(np.count_nonzero(col))
            point.stage_bit_errors[s] += int(col.sum())
    for k, v in zip(*np.unique(used, return_counts=True)):
        point.iters_hist[int(k)] = point.iters_hist.get(int(k), 0) + int(v)


def _run_point(sim: _Sim, ebno: float, pool, threads: int):
    e = sim.e
    sigma = ebno_to_sigma(ebno, sim.rate, MODULATIONS[e.modulation])
    point = FerPoint(ebno, info_bits=sim.K)
    ledgers = []
    B = e.batch_frames
    next_batch = 0
    pending = []

    def submit():
        nonlocal next_batch
        start = next_batch * B
        if start >= e.max_frames:
            return False
        n = min(B, e.max_frames - start)
        fut = pool.submit(sim.run_batch, start, n, sigma) if pool else None
        pending.append((start, n, fut))
        next_batch += 1
        return True

    while True:
        while len(pending) < max(1, threads) and submit():
            pass
        if not pending:
            break
        start, n, fut = pending.pop(0)
        batch = fut.result() if fut else sim.run_batch(start, n, sigma)
        _fold(point, batch, sim.stages)
        ledgers.append(batch[3])
        if point.frame_errors >= e.min_frame_errors or point.frames >= e.max_frames:
            break
    for _, _, fut in pending:
        if fut:
            fut.cancel()
    return point, merge_all(ledgers)


# ---------------------------------------------------------------- persistence

CURVE_COLUMNS = ("ebno_db", "frames", "frame_errors", "bit_errors", "fer", "ber", "mean_iters")
STAGE_COLUMNS = ("ebno_db", "stage", "iterations", "frame_errors", "bit_errors", "fer", "ber", "stopped")


def _fmt_ebno(x: float) -> str:
    return f"{x:.4f}"


def _curve_row(p: FerPoint, unit: float) -> list[str]:
    return [_fmt_ebno(p.ebno_db), str(p.frames), str(p.frame_errors), str(p.bit_errors),
            f"{p.fer:.6e}", f"{p.ber:.6e}", f"{p.mean_stage() * unit:.4f}"]


def _stage_rows(p: FerPoint, unit: float) -> list[list[str]]:
    rows = []
    for s, (fe, be) in enumerate(zip(p.stage_frame_errors, p.stage_bit_errors)):
        rows.append([_fmt_ebno(p.ebno_db), str(s), f"{s * unit:g}", str(fe), str(be),
                     f"{fe / p.frames:.6e}", f"{be / (p.frames * p.info_bits):.6e}", str(p.iters_hist.get(s, 0))])
    return rows


def _csv_line(row) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(row)
    return buf.getvalue()


def paths_for(out_dir, e: Experiment) -> dict:
    d = Path(out_dir)
    return {"curve": d / f"{e.name}.curve.csv", "stages": d / f"{e.name}.stages.csv", "manifest": d / f"{e.name}.manifest.json"}


def build_manifest(e: Experiment, rc: ResolvedCode, sim: _Sim, completed: int) -> dict:
    return {
        "tool": "decbench",
        "version": __version__,
        "label": e.name,
        "config": e.to_dict(),
        "config_hash": e.config_hash(),
        "seed": e.seed,
        "code_id": e.code,
        "code_name": getattr(rc.code, "name", ""),
        "info_bits": sim.K,
        "ebno_rate": str(sim.rate),
        "substitutions": list(rc.substitutions),
        "llr_format": e.fmt.describe(),
        "stage_unit": 0.5 if rc.family == "turbo" else 1.0,
        "points_completed": completed,
        "files": {k: p.name for k, p in paths_for(".", e).items()},
    }


def _write_manifest(path: Path, manifest: dict):
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)


def load_curve(curve_path, stages_path=None, label: str = "", stage_unit: float = 1.0) -> FerCurve:
    """Rebuild a FerCurve from its CSV files (per-stage data and histogram come from the stage file)."""
    points = {}
    with open(curve_path, newline="") as fh:
        rd = csv.DictReader(fh)
        for r in rd:
            p = FerPoint(float(r["ebno_db"]), int(r["frames"]), int(r["frame_errors"]), int(r["bit_errors"]))
            ber = float(r["ber"])
            p.info_bits = round(p.bit_errors / (ber * p.frames)) if ber > 0 else 0
            points[r["ebno_db"]] = p
    if stages_path is not None and Path(stages_path).exists():
        with open(stages_path, newline="") as fh:
            for r in csv.DictReader(fh):
                p = points.get(r["ebno_db"])
                if p is None:
                    continue
                p.stage_frame_errors.append(int(r["frame_errors"]))
                p.stage_bit_errors.append(int(r["bit_errors"]))
                if int(r["stopped"]):
                    p.iters_hist[int(r["stage"])] = int(r["stopped"])
                b = float(r["ber"])
                if b > 0 and p.info_bits == 0:
                    p.info_bits = round(int(r["bit_errors"]) / (b * p.frames))
    return FerCurve(label, list(points.values()), stage_unit)


def resume_state(out_dir, e: Experiment) -> FerCurve | None:
    """Completed points of an interrupted run with the same config, or None."""
    paths = paths_for(out_dir, e)
    if not paths["manifest"].exists() or not paths["curve"].exists():
        return None
    man = json.loads(paths["manifest"].read_text())
    if man.get("config_hash") != e.config_hash():
        return None
    curve = load_curve(paths["curve"], paths["stages"], e.name, man.get("stage_unit", 1.0))
    done = man.get("points_completed", 0)
    if len(curve.points) != done:
        return None
    return curve


def run_experiment(e: Experiment, out_dir=None, threads: int = 1, resume: bool = True) -> RunResult:
    """Simulate every Eb/N0 point; with ``out_dir`` each finished point is appended to disk."""
    rc = validate_experiment(e)
    sim = _Sim(e, rc)
    unit = 0.5 if rc.family == "turbo" else 1.0
    curve = FerCurve(e.name, [], unit)
    ledgers = {}
    paths = paths_for(out_dir, e) if out_dir is not None else None
    done = {}
    if paths is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        prev = resume_state(out_dir, e) if resume else None
        if prev is not None:
            done = {_fmt_ebno(p.ebno_db): p for p in prev.points}
            # the loaded info_bits may be 0 when no bit errors occurred; the simulation knows it
            for p in done.values():
                p.info_bits = sim.K
        else:
            paths["curve"].write_text(_csv_line(CURVE_COLUMNS))
            if sim.stages:
                paths["stages"].write_text(_csv_line(STAGE_COLUMNS))
            elif paths["stages"].exists():
                paths["stages"].unlink()
            _write_manifest(paths["manifest"], build_manifest(e, rc, sim, 0))
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for x in e.ebno_db:
            key = _fmt_ebno(x)
            if key in done:
                curve.points.append(done[key])
                continue
            point, led = _run_point(sim, x, pool, threads)
            curve.points.append(point)
            ledgers[x] = led
            if paths is not None:
                with open(paths["curve"], "a") as fh:
                    fh.write(_csv_line(_curve_row(point, unit)))
                if sim.stages:
                    with open(paths["stages"], "a") as fh:
                        for row in _stage_rows(point, unit):
                            fh.write(_csv_line(row))
                _write_manifest(paths["manifest"], build_manifest(e, rc, sim, len(curve.points)))
    finally:
        if pool:
            pool.shutdown(wait=True, cancel_futures=True)
    manifest = build_manifest(e, rc, sim, len(curve.points))
    return RunResult(e, curve, ledgers, manifest)


def format_curve_csv(curve: FerCurve) -> str:
    return _csv_line(CURVE_COLUMNS) + "".join(_csv_line(_curve_row(p, curve.stage_unit)) for p in curve.points)


# ---------------------------------------------------------------- comparisons


def ebno_at_fer(curve: FerCurve, target_fer: float, min_errors: int = 0) -> float:
    """Eb/N0 where the curve crosses ``target_fer``, interpolating linearly in log10(FER).

    Uses the first adjacent pair that brackets the target.  Zero-FER points sit at
    -inf on the log axis, so a crossing into zero is interpolated as a step at the
    zero point's Eb/N0 only when it is the bracketing partner; this never extrapolates.
    """
    if not 0 < target_fer < 1:
        raise ValueError("target FER must lie in (0, 1)")
    pts = [p for p in curve.points if p.frames > 0]
    for a, b in zip(pts, pts[1:]):
        if a.fer >= target_fer >= b.fer and a.fer > b.fer:
            if a.frame_errors < min_errors:
                raise InsufficientData(f"{curve.label}: {a.frame_errors} errors at {a.ebno_db:g} dB < {min_errors}")
            if b.frame_errors < min_errors and b.frames * target_fer < min_errors:
                raise InsufficientData(f"{curve.label}: too few frames at {b.ebno_db:g} dB")
            if b.fer == 0:
                return b.ebno_db
            la, lb, lt = math.log10(a.fer), math.log10(b.fer), math.log10(target_fer)
            if la == lb:
                return a.ebno_db
            return a.ebno_db + (b.ebno_db - a.ebno_db) * (la - lt) / (la - lb)
    raise InsufficientData(f"{curve.label}: FER {target_fer:g} is not bracketed by the simulated points")


def gap_at_fer(a: FerCurve, b: FerCurve, target_fer: float = 1e-2, min_errors: int = 0) -> float:
    """Eb/N0(b) - Eb/N0(a) at the target FER; positive when b needs more SNR."""
    return ebno_at_fer(b, target_fer, min_errors) - ebno_at_fer(a, target_fer, min_errors)


def stage_curves(run_or_curve, candidates=None) -> dict:
    """Per-iteration curves from one run that recorded every stage."""
    curve = run_or_curve.curve if isinstance(run_or_curve, RunResult) else run_or_curve
    n = curve.stages()
    if n < 1:
        raise ValueError("curve carries no per-stage data")
    unit = curve.stage_unit
    out = {}
    for s in range(1, n + 1):
        it = s * unit
        if candidates is None or it in candidates:
            out[it] = curve.at_stage(s)
    return out


def iterations_to_match(reference: FerCurve, experiment: Experiment | None = None, target_fer: float = 1e-2,
                        tolerance_db: float = 0.1, candidates=None, curves: dict | None = None,
                        min_errors: int = 0, out_dir=None, threads: int = 1):
    """Smallest candidate iteration count whose curve is within ``tolerance_db`` of the reference.

    Either supply ``curves`` ({iterations: FerCurve}) or an LDPC/turbo ``experiment``;
    the experiment is run once at the largest candidate with early stopping and
    the per-iteration curves are read off its stage counts.
    """
    if curves is None:
        if experiment is None:
            raise ValueError("need curves or an experiment")
        if candidates is None:
            candidates = list(range(1, int(experiment.iterations) + 1))
        top = max(candidates)
        run = run_experiment(replace(experiment, iterations=top), out_dir=out_dir, threads=threads)
        curves = stage_curves(run, set(candidates))
    if candidates is None:
        candidates = sorted(curves)
    ref_x = ebno_at_fer(reference, target_fer, min_errors)
    for c in sorted(candidates):
        if c not in curves:
            continue
        try:
            x = ebno_at_fer(curves[c], target_fer, min_errors)
        except InsufficientData:
            continue
        if x - ref_x <= tolerance_db:
            return c
    raise NoMatch(f"no candidate within {tolerance_db} dB of {reference.label} at FER {target_fer:g}")
