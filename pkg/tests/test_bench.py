import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdes_ecb import bench
from tdes_ecb.bench import (
    BenchRecord,
    SweepSpec,
    SweepVariable,
    emit_report,
    measure,
    parse_csv,
    run_sweep,
    speedup_table,
)
from tdes_ecb.dispatch import Backend, DispatchConfig
from tdes_ecb.errors import ConfigError

SMALL = 8 * 4096


def _rec(t, workers=1, **kw):
    return BenchRecord("threaded", workers, 131072, 256, 512 * bench.MB, t, 0.5, 512 / t, 1.0, **kw)


def _speedups(table: str) -> list[float]:
    return [float(line.split()[-1]) for line in table.strip().splitlines()[1:]]


def test_speedup_table_single_row():
    assert _speedups(speedup_table([_rec(3.0)])) == [1.0]


def test_speedup_table_ratio():
    assert _speedups(speedup_table([_rec(100.0), _rec(50.0, 2)])) == [1.0, 2.0]


def test_speedup_table_reference_timings():
    # Published 1/2/4-thread timings from an i7-950.
    recs = [_rec(2177.23, 1), _rec(1093.86, 2), _rec(544.43, 4)]
    got = _speedups(speedup_table(recs, baseline=lambda r: r.workers == 1))
    assert got == pytest.approx([1.00, 1.99, 4.00], abs=0.01)


def test_speedup_table_missing_baseline():
    with pytest.raises(ConfigError):
        speedup_table([_rec(1.0)], baseline=lambda r: r.workers == 99)
    with pytest.raises(ConfigError):
        speedup_table([_rec(1.0)], baseline=5)
    with pytest.raises(ConfigError):
        speedup_table([])


def test_csv_header_only_for_empty():
    out = emit_report([], "csv")
    assert out.decode().splitlines() == [",".join(bench.CSV_FIELDS)]
    assert parse_csv(out) == []


def test_csv_column_order_follows_record_fields():
    assert bench.CSV_FIELDS[:9] == [
        "backend", "workers", "chunk_blocks", "work_group", "payload_bytes",
        "compute_seconds", "io_seconds", "throughput_mb_s", "speedup_vs_baseline",
    ]


def test_csv_one_record_round_trip():
    r = _rec(1.25, runs=(1.25, 1.5, 1.3))
    out = emit_report([r], "csv")
    assert len(out.decode().splitlines()) == 2
    assert parse_csv(out) == [r]


finite = st.floats(min_value=0, max_value=1e9, allow_nan=False)
records = st.builds(
    BenchRecord,
    backend=st.sampled_from(["scalar", "threaded", "noop"]),
    workers=st.integers(1, 256),
    chunk_blocks=st.integers(1, 1 << 24),
    work_group=st.integers(1, 4096),
    payload_bytes=st.integers(0, 1 << 40),
    compute_seconds=finite,
    io_seconds=finite,
    throughput_mb_s=finite,
    speedup_vs_baseline=finite,
    runs=st.lists(finite, max_size=5).map(tuple),
    status=st.sampled_from(["ok", "failed: output mismatch vs scalar reference", "failed: x, y"]),
)


@given(st.lists(records, max_size=8))
def test_csv_round_trip_property(recs):
    assert parse_csv(emit_report(recs, "csv")) == recs


def test_markdown_and_unknown_format():
    md = emit_report([_rec(2.0)], "markdown").decode()
    assert md.startswith("| backend |") and md.count("\n") == 3
    with pytest.raises(ConfigError):
        emit_report([], "xml")


@pytest.mark.parametrize(
    "kw",
    [dict(values=[]), dict(values=[2, 1]), dict(values=[1, 1]), dict(repetitions=0), dict(payload_bytes=7)],
)
def test_sweep_spec_validation(kw):
    base = dict(variable=SweepVariable.WORKERS, values=[1, 2])
    with pytest.raises(ConfigError):
        SweepSpec(**{**base, **kw})


def test_sweep_row_count_and_baseline():
    spec = SweepSpec(SweepVariable.WORK_GROUP, [8, 64, 256], DispatchConfig(workers=2),
                     payload_bytes=SMALL, repetitions=2)
    recs = run_sweep(spec)
    assert len(recs) == len(spec.values)
    assert [r.work_group for r in recs] == [8, 64, 256]
    assert all(r.ok and len(r.runs) == 2 for r in recs)
    assert recs[0].speedup_vs_baseline == 1.0
    assert all(r.speedup_vs_baseline >= 0 for r in recs)
    for r in recs:
        assert r.compute_seconds == min(r.runs)
        assert math.isclose(r.throughput_mb_s, r.payload_bytes / r.compute_seconds / bench.MB)


def test_scalar_vs_threaded_single_worker():
    # The scalar path is the unfused reference, so it is expected to be slower, never faster.
    spec = SweepSpec(SweepVariable.WORKERS, [1], DispatchConfig(backend=Backend.SCALAR),
                     payload_bytes=SMALL, repetitions=1)
    scalar = run_sweep(spec)[0]
    threaded = run_sweep(SweepSpec(SweepVariable.WORKERS, [1], DispatchConfig(), SMALL, 1))[0]
    assert scalar.ok and threaded.ok
    assert scalar.compute_seconds > threaded.compute_seconds


def test_failed_backend_marked_and_sweep_continues(monkeypatch):
    real = bench.measure

    def flaky(cfg, *a, **kw):
        if cfg.workers == 2:
            raise RuntimeError("backend exploded")
        return real(cfg, *a, **kw)

    monkeypatch.setattr(bench, "measure", flaky)
    recs = run_sweep(SweepSpec(SweepVariable.WORKERS, [1, 2, 3], payload_bytes=SMALL, repetitions=1))
    assert [r.ok for r in recs] == [True, False, True]
    assert "backend exploded" in recs[1].status
    assert recs[1].compute_seconds == 0.0 and recs[1].speedup_vs_baseline == 0.0


def test_mismatching_output_is_never_reported(monkeypatch, ts3):
    import tdes_ecb.dispatch as dispatch

    real = dispatch.fused_crypt

    def corrupt(src, dst, start, count, kparts, decrypt):
        real(src, dst, start, count, kparts, decrypt)
        dst[start * 8] ^= 1

    monkeypatch.setattr(dispatch, "fused_crypt", corrupt)
    rec = measure(DispatchConfig(workers=1), bench.make_payload(SMALL), ts3, 1)
    assert not rec.ok and rec.compute_seconds == 0.0 and rec.throughput_mb_s == 0.0


def test_timing_excludes_io_with_noop_backend(ts3):
    rec = measure(DispatchConfig(backend=Backend.NOOP), bench.make_payload(8 << 20), ts3, 3)
    assert rec.ok
    assert rec.io_seconds > 0
    assert rec.compute_seconds < 0.05 * rec.io_seconds


def test_payload_is_seeded():
    assert bench.make_payload(64, 1) == bench.make_payload(64, 1) != bench.make_payload(64, 2)
