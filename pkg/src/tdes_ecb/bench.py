"""Benchmark harness: parameter sweeps, speedup tables and CSV/markdown reports.

A sweep generates a seeded payload, copies it once into the engine's input
buffer, then times only the engine transform. Copy-in and copy-out are
reported separately as I/O. Each timed configuration gets one untimed
warm-up run, and its output is spot-checked against the scalar reference
kernel before any timing is kept.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dispatch import BLOCK, Backend, DispatchConfig, EcbEngine
from .errors import ConfigError
from .kernels import reference_crypt
from .tdes import TripleKey, TripleSchedule, triple_schedule

MB = 1 << 20
BENCH_KEY = TripleKey.from_hex("0123456789abcdef23456789abcdef01456789abcdef0123")
DEFAULT_SEED = 0x3DE5_ECB0_2011_0001
SPOT_CHECK_BLOCKS = 2048


class SweepVariable(enum.Enum):
    WORK_GROUP = "work_group"
    CHUNK_BLOCKS = "chunk_blocks"
    WORKERS = "workers"


@dataclass
class BenchRecord:
    backend: str
    workers: int
    chunk_blocks: int
    work_group: int
    payload_bytes: int
    compute_seconds: float
    io_seconds: float
    throughput_mb_s: float
    speedup_vs_baseline: float
    runs: tuple[float, ...] = ()
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class SweepSpec:
    variable: SweepVariable
    values: list[int]
    fixed: DispatchConfig = field(default_factory=DispatchConfig)
    payload_bytes: int = 64 * MB
    repetitions: int = 3
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep values must be strictly increasing")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.payload_bytes < 0 or self.payload_bytes % BLOCK:
            raise ConfigError("payload_bytes must be a non-negative multiple of 8")

    def configs(self) -> list[DispatchConfig]:
        return [dataclasses.replace(self.fixed, **{self.variable.value: v}) for v in self.values]


def make_payload(nbytes: int, seed: int = DEFAULT_SEED) -> bytes:
    return np.random.default_rng(seed).bytes(nbytes)


def spot_check(src: np.ndarray, out: np.ndarray, ts: TripleSchedule, blocks: int = SPOT_CHECK_BLOCKS) -> bool:
    """Compare the head and tail of ``out`` against the scalar reference kernel."""
    total = src.size // BLOCK
    spans = {(0, min(blocks, total)), (max(0, total - blocks), min(blocks, total))}
    for start, count in spans:
        ref = np.empty(count * BLOCK, dtype=np.uint8)
        window = src[start * BLOCK:(start + count) * BLOCK]
        reference_crypt(window, ref, 0, count, ts.subkeys, False)
        if not np.array_equal(ref, out[start * BLOCK:(start + count) * BLOCK]):
            return False
    return True


def measure(cfg: DispatchConfig, payload: bytes, ts: TripleSchedule, repetitions: int,
            verify: bool = True, clock: Callable[[], float] = time.perf_counter) -> BenchRecord:
    """Time ``repetitions`` encryptions of ``payload`` under ``cfg``; keep the minimum."""
    # No-op output is the input, so there is nothing to check.
    verify = verify and cfg.backend is not Backend.NOOP
    runs, ios = [], []
    with EcbEngine(ts, cfg) as eng:
        eng.transform(np.frombuffer(payload, dtype=np.uint8), False)
        for _ in range(repetitions):
            t0 = clock()
            src = np.frombuffer(bytearray(payload), dtype=np.uint8)
            t1 = clock()
            out = eng.transform(src, False)
            t2 = clock()
            result = out.tobytes()
            t3 = clock()
            runs.append(t2 - t1)
            ios.append((t1 - t0) + (t3 - t2))
            if verify and not spot_check(src, np.frombuffer(result, dtype=np.uint8), ts):
                return _failed(cfg, len(payload), "failed: output mismatch vs scalar reference")
    best = min(runs)
    io_s = ios[runs.index(best)]
    tput = len(payload) / best / MB if best > 0 else 0.0
    return BenchRecord(cfg.backend.value, cfg.workers, cfg.chunk_blocks, cfg.work_group,
                       len(payload), best, io_s, tput, 1.0, tuple(runs))


def _failed(cfg, nbytes, status):
    return BenchRecord(cfg.backend.value, cfg.workers, cfg.chunk_blocks, cfg.work_group,
                       nbytes, 0.0, 0.0, 0.0, 0.0, (), status)


def run_sweep(spec: SweepSpec, ts: TripleSchedule | None = None, payload: bytes | None = None) -> list[BenchRecord]:
    """Run one record per sweep value. Speedups are relative to the first value."""
    ts = ts or triple_schedule(BENCH_KEY)
    if payload is None:
        payload = make_payload(spec.payload_bytes, spec.seed)
    records = []
    for cfg in spec.configs():
        try:
            rec = measure(cfg, payload, ts, spec.repetitions)
        except Exception as exc:  # a broken backend must not end the sweep
            rec = _failed(cfg, len(payload), f"failed: {type(exc).__name__}: {exc}")
        records.append(rec)
    return apply_speedups(records, 0)


def _baseline_index(records: Sequence[BenchRecord], baseline) -> int:
    if isinstance(baseline, int):
        if not 0 <= baseline < len(records):
            raise ConfigError(f"baseline index {baseline} out of range")
        return baseline
    for i, r in enumerate(records):
        if baseline(r):
            return i
    raise ConfigError("no record matches the baseline selector")


def apply_speedups(records: list[BenchRecord], baseline=0) -> list[BenchRecord]:
    if not records:
        return records
    base = records[_baseline_index(records, baseline)]
    for r in records:
        ok = r.ok and base.ok and r.compute_seconds > 0
        r.speedup_vs_baseline = base.compute_seconds / r.compute_seconds if ok else 0.0
    return records


def speedup_table(records: Sequence[BenchRecord], baseline: int | Callable[[BenchRecord], bool] = 0) -> str:
    """Format records as a time/speedup table in the style of a thread-scaling report.

    ``baseline`` is a record index or a predicate picking the reference row,
    normally the single-worker run.
    """
    if not records:
        raise ConfigError("no records to tabulate")
    base = records[_baseline_index(records, baseline)]
    lines = [
        f"{'backend':<9} {'workers':>7} {'chunk':>8} {'group':>6} {'time (s)':>12} {'speedup':>8}",
    ]
    for r in records:
        sp = base.compute_seconds / r.compute_seconds if r.compute_seconds > 0 else 0.0
        lines.append(
            f"{r.backend:<9} {r.workers:>7} {r.chunk_blocks:>8} {r.work_group:>6} "
            f"{r.compute_seconds:>12.4f} {sp:>8.2f}"
        )
    return "\n".join(lines) + "\n"


CSV_FIELDS = [f.name for f in dataclasses.fields(BenchRecord)]
_INT_FIELDS = {"workers", "chunk_blocks", "work_group", "payload_bytes"}
_FLOAT_FIELDS = {"compute_seconds", "io_seconds", "throughput_mb_s", "speedup_vs_baseline"}


def _cell(name, value):
    if name == "runs":
        return ";".join(repr(float(v)) for v in value)
    if name in _FLOAT_FIELDS:
        return repr(float(value))
    return str(value)


def emit_report(records: Sequence[BenchRecord], fmt: str = "csv") -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow([_cell(n, getattr(r, n)) for n in CSV_FIELDS])
        return buf.getvalue().encode()
    if fmt == "markdown":
        cols = CSV_FIELDS[:-2] + ["status"]
        out = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        for r in records:
            cells = []
            for n in cols:
                v = getattr(r, n)
                cells.append(f"{v:.4f}" if isinstance(v, float) else str(v))
            out.append("| " + " | ".join(cells) + " |")
        return ("\n".join(out) + "\n").encode()
    raise ConfigError(f"unknown report format {fmt!r} (expected csv or markdown)")


def parse_csv(data: bytes) -> list[BenchRecord]:
    rows = csv.DictReader(io.StringIO(data.decode()))
    if rows.fieldnames != CSV_FIELDS:
        raise ConfigError(f"unexpected CSV header: {rows.fieldnames}")
    records = []
    for row in rows:
        kw = {}
        for n in CSV_FIELDS:
            v = row[n]
            if n in _INT_FIELDS:
                kw[n] = int(v)
            elif n in _FLOAT_FIELDS:
                kw[n] = float(v)
            elif n == "runs":
                kw[n] = tuple(float(x) for x in v.split(";")) if v else ()
            else:
                kw[n] = v
        records.append(BenchRecord(**kw))
    return records
