"""Compiled batch kernels over big-endian byte buffers.

Two kernels transform the half-open block range ``[start, start + count)``
of ``src`` into the same range of ``dst``:

* ``reference_crypt`` calls the plain-table DES from ``des_core`` once per
  pass. It is slow and exists to be obviously correct.
* ``fused_crypt`` uses lookup tables derived from the plain tables: IP and
  FP become eight byte-indexed tables each, and each S-box is fused with P
  into a 64-entry table. The FP/IP pair between the three passes cancels and
  is skipped.

Both release the GIL, so worker threads run them concurrently.
"""

import numpy as np
from numba import njit

from . import tables
from .des_core import _permute
from .tdes import _ede

# Encryption walks the pass-major 48-key buffer as k1 forward, k2 backward,
# k3 forward. Decryption is the same walk reversed.
_ENC_SEQUENCE = np.array(
    list(range(0, 16)) + list(range(31, 15, -1)) + list(range(32, 48)), dtype=np.int64
)


def _byte_tables(table):
    out = np.zeros((8, 256), dtype=np.uint64)
    for pos in range(8):
        for b in range(256):
            out[pos, b] = _permute(np.uint64(b << (56 - 8 * pos)), table, 64)
    return out


def _sp_tables():
    out = np.zeros((8, 64), dtype=np.uint64)
    for box in range(8):
        for six in range(64):
            row = ((six >> 4) & 2) | (six & 1)
            col = (six >> 1) & 0xF
            nibble = tables.SBOXES[box][row][col]
            out[box, six] = _permute(np.uint64(nibble << (28 - 4 * box)), tables.P_ARR, 32)
    return out


IP_BYTES = _byte_tables(tables.IP_ARR)
FP_BYTES = _byte_tables(tables.FP_ARR)
SP = _sp_tables()

_M32 = np.uint64(0xFFFFFFFF)
_M6 = np.uint64(0x3F)
_FF = np.uint64(0xFF)


def split_subkeys(subkeys: np.ndarray) -> np.ndarray:
    """Split each 48-bit subkey into its eight 6-bit S-box inputs, MSB first."""
    out = np.empty((subkeys.shape[0], 8), dtype=np.uint64)
    for j in range(8):
        out[:, j] = (subkeys >> np.uint64(42 - 6 * j)) & _M6
    return out


@njit(cache=True, nogil=True, inline="always")
def _load(buf, off):
    v = np.uint64(0)
    for j in range(8):
        v = (v << np.uint64(8)) | np.uint64(buf[off + j])
    return v


@njit(cache=True, nogil=True, inline="always")
def _store(buf, off, v):
    for j in range(8):
        buf[off + 7 - j] = np.uint8(v & _FF)
        v = v >> np.uint64(8)


@njit(cache=True, nogil=True)
def reference_crypt(src, dst, start, count, subkeys, decrypt):
    for i in range(start, start + count):
        off = i * 8
        _store(dst, off, _ede(_load(src, off), subkeys, decrypt))


@njit(cache=True, nogil=True, inline="always")
def _byte_permute(v, tab):
    out = np.uint64(0)
    for pos in range(8):
        out |= tab[pos, (v >> np.uint64(56 - 8 * pos)) & _FF]
    return out


@njit(cache=True, nogil=True)
def fused_crypt(src, dst, start, count, kparts, decrypt):
    seq = _ENC_SEQUENCE
    one = np.uint64(1)
    for i in range(start, start + count):
        off = i * 8
        x = _byte_permute(_load(src, off), IP_BYTES)
        left = x >> np.uint64(32)
        right = x & _M32
        for n in range(48):
            k = seq[47 - n] if decrypt else seq[n]
            # 34-bit window: R32 | R1..R32 | R1, so E's groups are 6-bit slices at stride 4.
            w = ((right & one) << np.uint64(33)) | (right << one) | (right >> np.uint64(31))
            f = (
                SP[0, ((w >> np.uint64(28)) & _M6) ^ kparts[k, 0]]
                | SP[1, ((w >> np.uint64(24)) & _M6) ^ kparts[k, 1]]
                | SP[2, ((w >> np.uint64(20)) & _M6) ^ kparts[k, 2]]
                | SP[3, ((w >> np.uint64(16)) & _M6) ^ kparts[k, 3]]
                | SP[4, ((w >> np.uint64(12)) & _M6) ^ kparts[k, 4]]
                | SP[5, ((w >> np.uint64(8)) & _M6) ^ kparts[k, 5]]
                | SP[6, ((w >> np.uint64(4)) & _M6) ^ kparts[k, 6]]
                | SP[7, (w & _M6) ^ kparts[k, 7]]
            )
            left, right = right, left ^ f
            if n == 15 or n == 31:
                # End of a pass: undo the round swap; FP then IP cancel.
                left, right = right, left
        x = _byte_permute((right << np.uint64(32)) | left, FP_BYTES)
        _store(dst, off, x)
