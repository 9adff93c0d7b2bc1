"""Single-block DES built directly on the FIPS 46-3 tables.

This is the auditable reference path: every permutation walks its table
bit by bit, and S-box lookups index the standard's row/column layout. The
inner routines are compiled with numba so the same code can serve as the
scalar reference backend over large batches; the public functions below
wrap them for plain Python integers.

Bit numbering follows the standard (bit 1 = MSB). ``_permute`` is the only
place that maps table entries onto machine shifts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import tables
from .errors import KeyFormatError, ParityError, WeakKeyError

_IP = tables.IP_ARR
_FP = tables.FP_ARR
_E = tables.E_ARR
_P = tables.P_ARR
_PC1 = tables.PC1_ARR
_PC2 = tables.PC2_ARR
_SHIFTS = tables.SHIFTS_ARR
_SBOX = tables.SBOX_ARR

_ONE = np.uint64(1)
_MASK6 = np.uint64(0x3F)
_MASK28 = np.uint64(0xFFFFFFF)
_MASK32 = np.uint64(0xFFFFFFFF)
_MASK48 = (1 << 48) - 1
_MASK64 = (1 << 64) - 1


@njit(cache=True, nogil=True)
def _permute(value, table, in_bits):
    # Output bit k (1-based, MSB first) is input bit table[k-1].
    out = np.uint64(0)
    width = np.uint64(in_bits)
    for i in range(table.shape[0]):
        out = (out << _ONE) | ((value >> (width - np.uint64(table[i]))) & _ONE)
    return out


@njit(cache=True, nogil=True)
def _schedule_into(key, out):
    cd = _permute(key, _PC1, 64)
    c = cd >> np.uint64(28)
    d = cd & _MASK28
    for rnd in range(16):
        s = np.uint64(_SHIFTS[rnd])
        back = np.uint64(28) - s
        c = ((c << s) | (c >> back)) & _MASK28
        d = ((d << s) | (d >> back)) & _MASK28
        out[rnd] = _permute((c << np.uint64(28)) | d, _PC2, 56)


@njit(cache=True, nogil=True)
def _f(right, subkey):
    x = _permute(right, _E, 32) ^ subkey
    s_out = np.uint64(0)
    for i in range(8):
        six = (x >> np.uint64(42 - 6 * i)) & _MASK6
        row = ((six >> np.uint64(4)) & np.uint64(2)) | (six & _ONE)
        col = (six >> _ONE) & np.uint64(0xF)
        s_out = (s_out << np.uint64(4)) | np.uint64(_SBOX[i, row, col])
    return _permute(s_out, _P, 32)


@njit(cache=True, nogil=True)
def _des(block, subkeys, decrypt):
    x = _permute(block, _IP, 64)
    left = x >> np.uint64(32)
    right = x & _MASK32
    for rnd in range(16):
        k = subkeys[15 - rnd] if decrypt else subkeys[rnd]
        left, right = right, left ^ _f(right, k)
    # Final swap: the preoutput block is R16 L16.
    return _permute((right << np.uint64(32)) | left, _FP, 64)


def _as_u64(value: int) -> np.uint64:
    if not 0 <= value <= _MASK64:
        raise ValueError(f"value {value!r} does not fit in 64 bits")
    return np.uint64(value)


# ---------------------------------------------------------------- keys


def _odd_parity(byte: int) -> bool:
    return bin(byte).count("1") % 2 == 1


@dataclass(frozen=True)
class DesKey:
    """A 64-bit DES key; the low bit of each byte is a parity bit."""

    raw: int

    def __post_init__(self):
        if not isinstance(self.raw, int) or not 0 <= self.raw <= _MASK64:
            raise KeyFormatError("DES key must be a 64-bit unsigned integer")

    @classmethod
    def from_bytes(cls, data: bytes) -> DesKey:
        if len(data) != 8:
            raise KeyFormatError(f"DES key must be 8 bytes, got {len(data)}")
        return cls(int.from_bytes(data, "big"))

    @classmethod
    def from_hex(cls, text: str) -> DesKey:
        try:
            data = bytes.fromhex(text)
        except ValueError:
            raise KeyFormatError(f"invalid hex in key: {text!r}") from None
        return cls.from_bytes(data)

    def to_bytes(self) -> bytes:
        return self.raw.to_bytes(8, "big")

    def has_valid_parity(self) -> bool:
        return all(_odd_parity(b) for b in self.to_bytes())

    def normalized(self) -> DesKey:
        """Return the key with each parity bit set for odd parity."""
        out = bytearray()
        for b in self.to_bytes():
            hi = b & 0xFE
            out.append(hi if _odd_parity(hi) else hi | 1)
        return DesKey.from_bytes(bytes(out))

    @property
    def is_weak(self) -> bool:
        return self.normalized().raw in tables.WEAK_KEYS

    @property
    def is_semi_weak(self) -> bool:
        return self.normalized().raw in tables.SEMI_WEAK_KEYS


def check_key(key: DesKey, *, check_parity: bool = False, strict: bool = False) -> None:
    """Apply the parity and weak-key policies to ``key``.

    Bad parity raises only when ``check_parity`` is set. Weak and semi-weak
    keys warn, or raise under ``strict``.
    """
    if check_parity and not key.has_valid_parity():
        raise ParityError(f"key {key.to_bytes().hex()} fails odd-parity check")
    if key.is_weak or key.is_semi_weak:
        kind = "weak" if key.is_weak else "semi-weak"
        msg = f"key {key.to_bytes().hex()} is a DES {kind} key"
        if strict:
            raise WeakKeyError(msg)
        warnings.warn(msg, stacklevel=2)


@dataclass(frozen=True)
class RoundKeySet:
    """The 16 48-bit subkeys of one DES pass, in encryption order."""

    subkeys: tuple[int, ...]

    def __post_init__(self):
        if len(self.subkeys) != 16:
            raise ValueError(f"expected 16 subkeys, got {len(self.subkeys)}")
        for k in self.subkeys:
            if not 0 <= k <= _MASK48:
                raise ValueError(f"subkey {k:#x} exceeds 48 bits")

    def as_array(self) -> np.ndarray:
        return np.array(self.subkeys, dtype=np.uint64)


def key_schedule(key: DesKey | int) -> RoundKeySet:
    raw = key.raw if isinstance(key, DesKey) else key
    out = np.zeros(16, dtype=np.uint64)
    _schedule_into(_as_u64(raw), out)
    return RoundKeySet(tuple(int(k) for k in out))


def encrypt_block(block: int, schedule: RoundKeySet) -> int:
    return int(_des(_as_u64(block), schedule.as_array(), False))


def decrypt_block(block: int, schedule: RoundKeySet) -> int:
    return int(_des(_as_u64(block), schedule.as_array(), True))


def block_from_bytes(data: bytes) -> int:
    if len(data) != 8:
        raise ValueError(f"a block is 8 bytes, got {len(data)}")
    return int.from_bytes(data, "big")


def block_to_bytes(block: int) -> bytes:
    return block.to_bytes(8, "big")
