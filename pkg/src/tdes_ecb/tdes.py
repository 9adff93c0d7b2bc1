"""Triple DES in encrypt-decrypt-encrypt order.

The 48 subkeys live in one pass-major buffer (k1's 16, then k2's, then
k3's). Decryption walks the same buffer backwards instead of keeping a
second, reversed schedule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .des_core import DesKey, RoundKeySet, _as_u64, _des, check_key, key_schedule
from .errors import KeyFormatError


class KeyingOption(enum.Enum):
    THREE_KEYS = 1  # k1, k2, k3 independent
    TWO_KEYS = 2  # k3 = k1
    ONE_KEY = 3  # k1 = k2 = k3


_HEX_LENGTHS = {48: KeyingOption.THREE_KEYS, 32: KeyingOption.TWO_KEYS, 16: KeyingOption.ONE_KEY}


@dataclass(frozen=True)
class TripleKey:
    k1: DesKey
    k2: DesKey
    k3: DesKey
    keying_option: KeyingOption

    @classmethod
    def from_bytes(cls, data: bytes) -> TripleKey:
        n = len(data)
        if n == 24:
            parts = data[:8], data[8:16], data[16:]
            opt = KeyingOption.THREE_KEYS
        elif n == 16:
            parts = data[:8], data[8:], data[:8]
            opt = KeyingOption.TWO_KEYS
        elif n == 8:
            parts = data, data, data
            opt = KeyingOption.ONE_KEY
        else:
            raise KeyFormatError(f"3DES key must be 8, 16 or 24 bytes, got {n}")
        k1, k2, k3 = (DesKey.from_bytes(p) for p in parts)
        return cls(k1, k2, k3, opt)

    @classmethod
    def from_hex(cls, text: str) -> TripleKey:
        text = text.strip()
        if len(text) not in _HEX_LENGTHS:
            raise KeyFormatError(
                f"key must be 16, 32 or 48 hex characters, got {len(text)}"
            )
        try:
            data = bytes.fromhex(text)
        except ValueError:
            raise KeyFormatError("invalid hex in key") from None
        return cls.from_bytes(data)

    def to_bytes(self) -> bytes:
        if self.keying_option is KeyingOption.ONE_KEY:
            return self.k1.to_bytes()
        if self.keying_option is KeyingOption.TWO_KEYS:
            return self.k1.to_bytes() + self.k2.to_bytes()
        return self.k1.to_bytes() + self.k2.to_bytes() + self.k3.to_bytes()

    def check(self, *, check_parity: bool = False, strict: bool = False) -> None:
        for k in {self.k1, self.k2, self.k3}:
            check_key(k, check_parity=check_parity, strict=strict)


@dataclass(frozen=True)
class TripleSchedule:
    pass1: RoundKeySet
    pass2: RoundKeySet
    pass3: RoundKeySet
    subkeys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        buf = np.concatenate([self.pass1.as_array(), self.pass2.as_array(), self.pass3.as_array()])
        buf.flags.writeable = False
        object.__setattr__(self, "subkeys", buf)


def triple_schedule(key: TripleKey) -> TripleSchedule:
    s1 = key_schedule(key.k1)
    s2 = s1 if key.k2 == key.k1 else key_schedule(key.k2)
    s3 = s1 if key.k3 == key.k1 else key_schedule(key.k3)
    return TripleSchedule(s1, s2, s3)


@njit(cache=True, nogil=True)
def _ede(block, subkeys, decrypt):
    if decrypt:
        x = _des(block, subkeys[32:48], True)
        x = _des(x, subkeys[16:32], False)
        return _des(x, subkeys[0:16], True)
    x = _des(block, subkeys[0:16], False)
    x = _des(x, subkeys[16:32], True)
    return _des(x, subkeys[32:48], False)


def tdes_encrypt_block(block: int, ts: TripleSchedule) -> int:
    return int(_ede(_as_u64(block), ts.subkeys, False))


def tdes_decrypt_block(block: int, ts: TripleSchedule) -> int:
    return int(_ede(_as_u64(block), ts.subkeys, True))
