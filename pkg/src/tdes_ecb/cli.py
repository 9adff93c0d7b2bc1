"""Command-line front end.

Exit codes:
    0  success
    1  unexpected internal error
    2  usage error (bad flags, bad hex, wrong key length)
    3  key file content is not a valid key
    4  parity failure under --check-parity
    5  weak key under --strict-keys
    6  input/ciphertext length not a multiple of 8
    7  bad PKCS#7 padding on decrypt
    8  read/write failure
    9  input or key file not found
    10 verify found a failing check
"""

from __future__ import annotations

import argparse
import enum
import sys
import warnings
from dataclasses import dataclass, field

from . import bench
from .dispatch import (
    DEFAULT_CHUNK_BLOCKS,
    DEFAULT_WORK_GROUP,
    Backend,
    DispatchConfig,
    EcbEngine,
    PaddingMode,
    default_workers,
)
from .errors import ConfigError, KeyFormatError, TdesError
from .kat import run_verify
from .tdes import TripleKey, triple_schedule

EXIT_NOT_FOUND = 9
EXIT_VERIFY_FAILED = 10


class Verb(enum.Enum):
    ENCRYPT = "encrypt"
    DECRYPT = "decrypt"
    VERIFY = "verify"
    BENCH = "bench"


@dataclass
class CliCommand:
    verb: Verb
    key_hex: str | None = None
    key_file: str | None = None
    input: str = "-"
    output: str = "-"
    padding: PaddingMode = PaddingMode.NONE
    dispatch: DispatchConfig = field(default_factory=DispatchConfig)
    check_parity: bool = False
    strict_keys: bool = False
    # bench only
    sweep: bench.SweepVariable | None = None
    values: list[int] = field(default_factory=list)
    payload_mb: float = 64
    seed: int = bench.DEFAULT_SEED
    repetitions: int = 3
    report_format: str = "csv"
    table: bool = False


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t]


def _add_dispatch_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chunk-blocks", type=_positive_int, default=DEFAULT_CHUNK_BLOCKS,
                   help="64-bit blocks per dispatch (default %(default)s)")
    p.add_argument("--work-group", type=_positive_int, default=DEFAULT_WORK_GROUP,
                   help="blocks per worker task (default %(default)s)")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker threads (default: $TDES_WORKERS or CPU count)")
    p.add_argument("--backend", choices=[b.value for b in Backend], default=Backend.THREADED.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdes-ecb", description="Parallel 3DES-ECB engine and benchmark.")
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb in ("encrypt", "decrypt"):
        p = sub.add_parser(verb, help=f"{verb} a file (raw ECB bytes, no header)")
        keys = p.add_mutually_exclusive_group(required=True)
        keys.add_argument("--key", help="16, 32 or 48 hex characters")
        keys.add_argument("--key-file", help="file holding the hex key")
        p.add_argument("input", nargs="?", default="-")
        p.add_argument("output", nargs="?", default="-")
        p.add_argument("--pkcs7", action="store_true", help="apply/strip PKCS#7 padding")
        p.add_argument("--check-parity", action="store_true", help="reject keys with bad parity")
        p.add_argument("--strict-keys", action="store_true", help="reject weak and semi-weak keys")
        _add_dispatch_flags(p)

    sub.add_parser("verify", help="run the embedded known-answer and property checks")

    p = sub.add_parser("bench", help="run a parameter sweep")
    p.add_argument("--sweep", choices=["workers", "chunk-blocks", "work-group"], default="workers")
    p.add_argument("--values", type=_int_list, default=None,
                   help="comma-separated, strictly increasing (default depends on --sweep)")
    p.add_argument("--payload-mb", type=float, default=64)
    p.add_argument("--seed", type=int, default=bench.DEFAULT_SEED)
    p.add_argument("--reps", type=_positive_int, default=3)
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--table", action="store_true", help="also print a speedup table to stderr")
    p.add_argument("--output", default="-")
    _add_dispatch_flags(p)
    return parser


_SWEEP_DEFAULTS = {
    "workers": [1, 2, 4],
    "chunk-blocks": [128, 1024, 16384, 131072],
    "work-group": [8, 64, 256, 512],
}


def parse_args(argv: list[str] | None = None) -> CliCommand:
    parser = build_parser()
    ns = parser.parse_args(argv)
    verb = Verb(ns.verb)
    if verb is Verb.VERIFY:
        return CliCommand(verb)

    try:
        workers = ns.workers if ns.workers is not None else default_workers()
        cfg = DispatchConfig(ns.chunk_blocks, ns.work_group, workers, Backend(ns.backend))
    except ConfigError as exc:
        parser.error(str(exc))

    if verb is Verb.BENCH:
        values = ns.values or _SWEEP_DEFAULTS[ns.sweep]
        if any(b <= a for a, b in zip(values, values[1:])):
            parser.error("--values must be strictly increasing")
        nbytes = int(ns.payload_mb * bench.MB)
        if ns.payload_mb <= 0 or nbytes % 8:
            parser.error("--payload-mb must give a positive multiple of 8 bytes")
        return CliCommand(
            verb, output=ns.output, dispatch=cfg,
            sweep=bench.SweepVariable(ns.sweep.replace("-", "_")), values=values,
            payload_mb=ns.payload_mb, seed=ns.seed, repetitions=ns.reps,
            report_format=ns.format, table=ns.table,
        )

    if ns.key is not None:
        try:
            TripleKey.from_hex(ns.key)
        except KeyFormatError as exc:
            parser.error(f"--key: {exc}")
    return CliCommand(
        verb, key_hex=ns.key, key_file=ns.key_file, input=ns.input, output=ns.output,
        padding=PaddingMode.PKCS7 if ns.pkcs7 else PaddingMode.NONE, dispatch=cfg,
        check_parity=ns.check_parity, strict_keys=ns.strict_keys,
    )


def _load_key(cmd: CliCommand) -> TripleKey:
    if cmd.key_hex is not None:
        return TripleKey.from_hex(cmd.key_hex)
    with open(cmd.key_file, encoding="ascii", errors="replace") as fh:
        return TripleKey.from_hex(fh.read().strip())


def _open_in(path):
    return sys.stdin.buffer if path == "-" else open(path, "rb")


def _open_out(path):
    return sys.stdout.buffer if path == "-" else open(path, "wb")


def _crypt(cmd: CliCommand) -> int:
    key = _load_key(cmd)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        key.check(check_parity=cmd.check_parity, strict=cmd.strict_keys)
    ts = triple_schedule(key)
    src = _open_in(cmd.input)
    try:
        dst = _open_out(cmd.output)
        try:
            with EcbEngine(ts, cmd.dispatch) as eng:
                if cmd.verb is Verb.ENCRYPT:
                    rep = eng.encrypt_stream(src, dst, cmd.padding)
                else:
                    rep = eng.decrypt_stream(src, dst, cmd.padding)
        finally:
            if dst is not sys.stdout.buffer:
                dst.close()
    finally:
        if src is not sys.stdin.buffer:
            src.close()
    print(f"{cmd.verb.value}: {rep.summary()}", file=sys.stderr)
    return 0


def _verify() -> int:
    ok, results, elapsed = run_verify()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name} {r.detail}".rstrip(), file=sys.stderr)
    print(f"verify: {'ok' if ok else 'FAILED'} in {elapsed:.3f} s", file=sys.stderr)
    return 0 if ok else EXIT_VERIFY_FAILED


def _bench(cmd: CliCommand) -> int:
    spec = bench.SweepSpec(cmd.sweep, cmd.values, cmd.dispatch, int(cmd.payload_mb * bench.MB),
                           cmd.repetitions, cmd.seed)
    records = bench.run_sweep(spec)
    report = bench.emit_report(records, cmd.report_format)
    out = _open_out(cmd.output)
    try:
        out.write(report)
        out.flush()
    finally:
        if out is not sys.stdout.buffer:
            out.close()
    if cmd.table:
        sys.stderr.write(bench.speedup_table(records))
    return 0


def run(cmd: CliCommand) -> int:
    try:
        if cmd.verb is Verb.VERIFY:
            return _verify()
        if cmd.verb is Verb.BENCH:
            return _bench(cmd)
        return _crypt(cmd)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except TdesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 8


def main(argv: list[str] | None = None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
