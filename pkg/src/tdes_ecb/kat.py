"""Embedded known-answer vectors and the self-test run by ``tdes-ecb verify``.

Every vector was confirmed against an independent DES implementation
before being frozen here; tests/test_kat.py repeats that confirmation.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

import numpy as np

from .des_core import DesKey, decrypt_block, encrypt_block, key_schedule
from .dispatch import Backend, DispatchConfig, EcbEngine
from .tdes import TripleKey, tdes_decrypt_block, tdes_encrypt_block, triple_schedule

# (key, plaintext, ciphertext), hex
DES_VECTORS = [
    ("133457799BBCDFF1", "0123456789ABCDEF", "85E813540F0AB405"),
    ("0E329232EA6D0D73", "8787878787878787", "0000000000000000"),
    ("0101010101010101", "8000000000000000", "95F8A5E5DD31D900"),
    ("0101010101010101", "4000000000000000", "DD7F121CA5015619"),
    ("8001010101010101", "0000000000000000", "95A8D72813DAA94D"),
    ("0123456789ABCDEF", "4E6F772069732074", "3FA40E8A984D4815"),
    ("7CA110454A1A6E57", "01A1D6D039776742", "690F5B0D9A26939B"),
]

TDES_VECTORS = [
    ("0123456789ABCDEF23456789ABCDEF01456789ABCDEF0123", "5468652071756663", "A826FD8CE53B855F"),
    ("0123456789ABCDEF23456789ABCDEF01456789ABCDEF0123", "6B2062726F776E20", "CCE21C8112256FE6"),
    ("0123456789ABCDEF23456789ABCDEF01456789ABCDEF0123", "666F78206A756D70", "68D5C05DD9B6B900"),
    ("0123456789ABCDEFFEDCBA9876543210", "0123456789ABCDEF", "1A4D672DCA6CB335"),
    ("133457799BBCDFF1", "0123456789ABCDEF", "85E813540F0AB405"),
]

# Key schedule of 133457799BBCDFF1: first and last subkeys.
SCHEDULE_VECTOR = ("133457799BBCDFF1", 0x1B02EFFC7072, 0xCB3D8B0E17F5)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check_des() -> CheckResult:
    for k, p, c in DES_VECTORS:
        ks = key_schedule(DesKey.from_hex(k))
        if encrypt_block(int(p, 16), ks) != int(c, 16):
            return CheckResult("des-kat", False, f"encrypt key={k} pt={p}")
        if decrypt_block(int(c, 16), ks) != int(p, 16):
            return CheckResult("des-kat", False, f"decrypt key={k} ct={c}")
    return CheckResult("des-kat", True, f"{len(DES_VECTORS)} vectors")


def _check_schedule() -> CheckResult:
    k, first, last = SCHEDULE_VECTOR
    sub = key_schedule(DesKey.from_hex(k)).subkeys
    return CheckResult("key-schedule", sub[0] == first and sub[15] == last)


def _check_tdes() -> CheckResult:
    for k, p, c in TDES_VECTORS:
        ts = triple_schedule(TripleKey.from_hex(k))
        if tdes_encrypt_block(int(p, 16), ts) != int(c, 16):
            return CheckResult("tdes-kat", False, f"encrypt key={k} pt={p}")
        if tdes_decrypt_block(int(c, 16), ts) != int(p, 16):
            return CheckResult("tdes-kat", False, f"decrypt key={k} ct={c}")
    return CheckResult("tdes-kat", True, f"{len(TDES_VECTORS)} vectors")


def _check_backends() -> CheckResult:
    # The three-block 3DES vector set as one ECB message, through every backend.
    k = TDES_VECTORS[0][0]
    pt = bytes.fromhex("".join(v[1] for v in TDES_VECTORS[:3]))
    ct = bytes.fromhex("".join(v[2] for v in TDES_VECTORS[:3]))
    ts = triple_schedule(TripleKey.from_hex(k))
    for backend in (Backend.SCALAR, Backend.THREADED):
        cfg = DispatchConfig(chunk_blocks=2, work_group=1, workers=2, backend=backend)
        with EcbEngine(ts, cfg) as eng:
            out = eng.transform(np.frombuffer(pt, dtype=np.uint8), False).tobytes()
            back = eng.transform(np.frombuffer(ct, dtype=np.uint8), True).tobytes()
        if out != ct or back != pt:
            return CheckResult("ecb-backends", False, backend.value)
    return CheckResult("ecb-backends", True)


def _check_properties(samples: int = 200, seed: int = 1) -> CheckResult:
    rng = random.Random(seed)
    mask = (1 << 64) - 1
    for _ in range(samples):
        k, x = rng.getrandbits(64), rng.getrandbits(64)
        ks = key_schedule(k)
        y = encrypt_block(x, ks)
        if decrypt_block(y, ks) != x:
            return CheckResult("properties", False, "des round trip")
        if encrypt_block(x ^ mask, key_schedule(k ^ mask)) != y ^ mask:
            return CheckResult("properties", False, "complementation")
        ts = triple_schedule(TripleKey.from_bytes(k.to_bytes(8, "big")))
        if tdes_encrypt_block(x, ts) != y:
            return CheckResult("properties", False, "EDE collapse")
    return CheckResult("properties", True, f"{samples} samples")


def run_verify() -> tuple[bool, list[CheckResult], float]:
    t = time.perf_counter()
    results = [_check_schedule(), _check_des(), _check_tdes(), _check_backends(), _check_properties()]
    return all(r.passed for r in results), results, time.perf_counter() - t
