"""ECB batch engine: chunked dispatch of independent blocks to a worker pool.

Input is cut into chunks of ``chunk_blocks`` blocks. Each chunk is split
into work groups of ``work_group`` blocks; pool workers claim groups from
a shared counter until the chunk is exhausted, then the engine moves on to
the next chunk. Every block's output position equals its input position,
so scheduling order never shows up in the ciphertext.
"""

from __future__ import annotations

import enum
import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import BinaryIO

import numpy as np

from .errors import ConfigError, InputLengthError, PaddingError, StreamIOError
from .kernels import fused_crypt, reference_crypt, split_subkeys
from .tdes import TripleSchedule

BLOCK = 8
DEFAULT_CHUNK_BLOCKS = 131072
DEFAULT_WORK_GROUP = 256
WORKERS_ENV = "TDES_WORKERS"


class Backend(enum.Enum):
    SCALAR = "scalar"
    THREADED = "threaded"
    NOOP = "noop"  # leaves data untouched; used to calibrate timing splits


class PaddingMode(enum.Enum):
    NONE = "none"
    PKCS7 = "pkcs7"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class DispatchConfig:
    chunk_blocks: int = DEFAULT_CHUNK_BLOCKS
    work_group: int = DEFAULT_WORK_GROUP
    workers: int = field(default_factory=default_workers)
    backend: Backend = Backend.THREADED

    def __post_init__(self):
        for name in ("chunk_blocks", "work_group", "workers"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")

    @property
    def group_count(self) -> int:
        """Work groups per full chunk, rounding the tail group up."""
        n, wg = self.chunk_blocks, self.work_group
        return n // wg + (0 if n % wg == 0 else 1)


def plan_dispatch(total_blocks: int, cfg: DispatchConfig) -> list[tuple[int, int]]:
    """Return ``(offset, length)`` chunk spans covering ``[0, total_blocks)`` exactly."""
    if total_blocks < 0:
        raise ValueError("total_blocks must be >= 0")
    n = cfg.chunk_blocks
    return [(i, min(n, total_blocks - i)) for i in range(0, total_blocks, n)]


@dataclass
class Batch:
    """Contiguous blocks as a uint8 array; ``origin_offset`` is the source byte offset."""

    blocks: np.ndarray
    origin_offset: int = 0

    def __post_init__(self):
        if not isinstance(self.blocks, np.ndarray):
            self.blocks = np.frombuffer(self.blocks, dtype=np.uint8)
        if self.blocks.dtype != np.uint8 or self.blocks.ndim != 1:
            raise ValueError("Batch.blocks must be a 1-D uint8 array")
        if self.blocks.size % BLOCK:
            raise InputLengthError(f"batch length {self.blocks.size} is not a multiple of 8")

    def __len__(self) -> int:
        return self.blocks.size // BLOCK

    def to_bytes(self) -> bytes:
        return self.blocks.tobytes()


def pkcs7_pad(data: bytes, block: int = BLOCK) -> bytes:
    n = block - len(data) % block
    return data + bytes([n]) * n


def pkcs7_unpad(data: bytes, block: int = BLOCK) -> bytes:
    if not data or len(data) % block:
        raise PaddingError("bad PKCS#7 padding: length is not a positive multiple of 8")
    n = data[-1]
    if not 1 <= n <= block or data[-n:] != bytes([n]) * n:
        raise PaddingError("bad PKCS#7 padding")
    return data[:-n]


@dataclass
class StreamReport:
    bytes_in: int = 0
    bytes_out: int = 0
    chunks: int = 0
    compute_seconds: float = 0.0
    io_seconds: float = 0.0

    def summary(self) -> str:
        return (
            f"{self.bytes_in} bytes in, {self.bytes_out} bytes out, {self.chunks} chunks, "
            f"compute {self.compute_seconds:.6f} s, I/O {self.io_seconds:.6f} s"
        )


class EcbEngine:
    """Owns the worker pool and the per-schedule kernel tables.

    Use one engine per submitting thread; ``transform`` is not reentrant.
    """

    def __init__(self, ts: TripleSchedule, cfg: DispatchConfig | None = None):
        self.ts = ts
        self.cfg = cfg or DispatchConfig()
        self._kparts = split_subkeys(ts.subkeys)
        self._pool = None
        if self.cfg.backend is Backend.THREADED:
            self._pool = ThreadPoolExecutor(self.cfg.workers, thread_name_prefix="tdes")
        self.chunks_dispatched = 0

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- block transforms

    def transform(self, src: np.ndarray, decrypt: bool, out: np.ndarray | None = None) -> np.ndarray:
        """Encrypt or decrypt a uint8 buffer of whole blocks, out of place."""
        if src.size % BLOCK:
            raise InputLengthError(f"input length {src.size} is not a multiple of 8")
        if self.cfg.backend is Backend.NOOP:
            return src
        dst = np.empty_like(src) if out is None else out
        for start, count in plan_dispatch(src.size // BLOCK, self.cfg):
            self._run_chunk(src, dst, start, count, decrypt)
            self.chunks_dispatched += 1
        return dst

    def _run_chunk(self, src, dst, start, count, decrypt):
        if self.cfg.backend is Backend.SCALAR:
            reference_crypt(src, dst, start, count, self.ts.subkeys, decrypt)
            return
        wg = self.cfg.work_group
        n_groups = count // wg + (0 if count % wg == 0 else 1)
        end = start + count
        claim = itertools.count()
        kparts = self._kparts

        def worker():
            # next() on itertools.count is atomic under the GIL.
            while True:
                g = next(claim)
                if g >= n_groups:
                    return
                s = start + g * wg
                fused_crypt(src, dst, s, min(wg, end - s), kparts, decrypt)

        futures = [self._pool.submit(worker) for _ in range(min(self.cfg.workers, n_groups))]
        for f in futures:
            f.result()

    def encrypt_batch(self, batch: Batch) -> Batch:
        return Batch(self.transform(batch.blocks, False), batch.origin_offset)

    def decrypt_batch(self, batch: Batch) -> Batch:
        return Batch(self.transform(batch.blocks, True), batch.origin_offset)

    # -- streams

    def encrypt_stream(self, source: BinaryIO, sink: BinaryIO, pad: PaddingMode = PaddingMode.NONE) -> StreamReport:
        return self._stream(source, sink, pad, decrypt=False)

    def decrypt_stream(self, source: BinaryIO, sink: BinaryIO, pad: PaddingMode = PaddingMode.NONE) -> StreamReport:
        return self._stream(source, sink, pad, decrypt=True)

    def _stream(self, source, sink, pad, decrypt):
        rep = StreamReport()
        start_chunks = self.chunks_dispatched
        size = self.cfg.chunk_blocks * BLOCK
        clock = time.perf_counter

        t = clock()
        chunk = _read_full(source, size, 0)
        rep.io_seconds += clock() - t
        while True:
            t = clock()
            nxt = _read_full(source, size, rep.bytes_in + len(chunk)) if len(chunk) == size else b""
            rep.io_seconds += clock() - t
            rep.bytes_in += len(chunk)
            last = not nxt

            t = clock()
            if last and pad is PaddingMode.PKCS7 and not decrypt:
                chunk = pkcs7_pad(chunk)
            if len(chunk) % BLOCK:
                what = "ciphertext" if decrypt else "input"
                raise InputLengthError(f"{what} length not a multiple of 8")
            if chunk:
                # Arrays go to the sink through the buffer protocol; no extra copy.
                out = self.transform(np.frombuffer(chunk, dtype=np.uint8), decrypt)
            else:
                out = b""
            if last and pad is PaddingMode.PKCS7 and decrypt:
                out = pkcs7_unpad(bytes(out))
            rep.compute_seconds += clock() - t

            t = clock()
            try:
                sink.write(out)
            except OSError as exc:
                raise StreamIOError(f"write failed: {exc}", rep.bytes_out) from exc
            rep.io_seconds += clock() - t
            rep.bytes_out += len(out)
            if last:
                break
            chunk = nxt
        t = clock()
        try:
            sink.flush()
        except OSError as exc:
            raise StreamIOError(f"flush failed: {exc}", rep.bytes_out) from exc
        rep.io_seconds += clock() - t
        rep.chunks = self.chunks_dispatched - start_chunks
        return rep


def _read_full(source, n, offset):
    parts = []
    got = 0
    while got < n:
        try:
            b = source.read(n - got)
        except OSError as exc:
            raise StreamIOError(f"read failed: {exc}", offset + got) from exc
        if not b:
            break
        parts.append(b)
        got += len(b)
    return b"".join(parts)


def encrypt_batch(batch: Batch, ts: TripleSchedule, cfg: DispatchConfig | None = None) -> Batch:
    with EcbEngine(ts, cfg) as eng:
        return eng.encrypt_batch(batch)


def decrypt_batch(batch: Batch, ts: TripleSchedule, cfg: DispatchConfig | None = None) -> Batch:
    with EcbEngine(ts, cfg) as eng:
        return eng.decrypt_batch(batch)


def encrypt_stream(source, sink, ts, cfg=None, pad=PaddingMode.NONE) -> StreamReport:
    with EcbEngine(ts, cfg) as eng:
        return eng.encrypt_stream(source, sink, pad)


def decrypt_stream(source, sink, ts, cfg=None, pad=PaddingMode.NONE) -> StreamReport:
    with EcbEngine(ts, cfg) as eng:
        return eng.decrypt_stream(source, sink, pad)
