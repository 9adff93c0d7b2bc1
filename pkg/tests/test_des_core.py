import random
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import crypto_decrypt, crypto_encrypt, textbook_schedule
from tdes_ecb import tables
from tdes_ecb.des_core import (
    DesKey,
    RoundKeySet,
    block_from_bytes,
    block_to_bytes,
    check_key,
    decrypt_block,
    encrypt_block,
    key_schedule,
)
from tdes_ecb.errors import KeyFormatError, ParityError, WeakKeyError
from tdes_ecb.kat import DES_VECTORS, SCHEDULE_VECTOR

MASK64 = (1 << 64) - 1
PARITY_BITS = [1 << (8 * i) for i in range(8)]
u64 = st.integers(min_value=0, max_value=MASK64)


# -- key schedule


def test_schedule_walkthrough_first_and_last_subkeys():
    key, first, last = SCHEDULE_VECTOR
    sub = key_schedule(DesKey.from_hex(key)).subkeys
    assert sub[0] == 0b000110_110000_001011_101111_111111_000111_000001_110010 == first
    assert sub[15] == 0b110010_110011_110110_001011_000011_100001_011111_110101 == last


@pytest.mark.parametrize("seed", range(20))
def test_schedule_matches_textbook_oracle(seed):
    key = random.Random(seed).getrandbits(64).to_bytes(8, "big")
    assert list(key_schedule(DesKey.from_bytes(key)).subkeys) == textbook_schedule(key)


def test_zero_key_gives_sixteen_identical_subkeys():
    sub = key_schedule(0).subkeys
    assert len(set(sub)) == 1


@given(u64, st.integers(min_value=0, max_value=255))
def test_schedule_ignores_parity_bits(k, flips):
    flipped = k
    for i, bit in enumerate(PARITY_BITS):
        if flips >> i & 1:
            flipped ^= bit
    assert key_schedule(k) == key_schedule(flipped)


@given(u64)
def test_subkeys_fit_48_bits(k):
    ks = key_schedule(k)
    assert len(ks.subkeys) == 16
    assert all(0 <= s < 1 << 48 for s in ks.subkeys)


def test_round_key_set_rejects_bad_shapes():
    with pytest.raises(ValueError):
        RoundKeySet((0,) * 15)
    with pytest.raises(ValueError):
        RoundKeySet((0,) * 15 + (1 << 48,))


# -- block cipher


@pytest.mark.parametrize("key,pt,ct", DES_VECTORS)
def test_known_answers(key, pt, ct):
    # Fixtures must agree with the independent implementation first.
    kb, pb, cb = (bytes.fromhex(x) for x in (key, pt, ct))
    assert crypto_encrypt(kb, pb) == cb
    ks = key_schedule(DesKey.from_bytes(kb))
    assert encrypt_block(block_from_bytes(pb), ks) == block_from_bytes(cb)
    assert block_to_bytes(decrypt_block(block_from_bytes(cb), ks)) == pb


def test_random_blocks_match_openssl():
    r = random.Random(7)
    for _ in range(300):
        k, x = r.getrandbits(64), r.getrandbits(64)
        kb, xb = k.to_bytes(8, "big"), x.to_bytes(8, "big")
        y = encrypt_block(x, key_schedule(k))
        assert y.to_bytes(8, "big") == crypto_encrypt(kb, xb)
        assert decrypt_block(x, key_schedule(k)).to_bytes(8, "big") == crypto_decrypt(kb, xb)


def test_round_trip_ten_thousand():
    r = random.Random(11)
    for _ in range(10_000):
        ks = key_schedule(r.getrandbits(64))
        x = r.getrandbits(64)
        assert decrypt_block(encrypt_block(x, ks), ks) == x
        assert encrypt_block(decrypt_block(x, ks), ks) == x


@given(u64, u64)
def test_complementation(k, x):
    y = encrypt_block(x, key_schedule(k))
    assert encrypt_block(x ^ MASK64, key_schedule(k ^ MASK64)) == y ^ MASK64


@pytest.mark.parametrize("weak", tables.WEAK_KEYS)
@given(x=u64)
def test_weak_keys_are_involutions(weak, x):
    ks = key_schedule(weak)
    assert encrypt_block(encrypt_block(x, ks), ks) == x


@given(u64)
def test_zero_key_round_trip(x):
    ks = key_schedule(0)
    assert decrypt_block(encrypt_block(x, ks), ks) == x


@given(u64, u64)
def test_deterministic(k, x):
    ks = key_schedule(k)
    assert encrypt_block(x, ks) == encrypt_block(x, ks) == encrypt_block(x, key_schedule(k))


def test_rejects_out_of_range_block():
    ks = key_schedule(0)
    with pytest.raises(ValueError):
        encrypt_block(1 << 64, ks)
    with pytest.raises(ValueError):
        block_from_bytes(b"1234567")


# -- key objects


@given(u64)
def test_normalize_idempotent_and_valid(k):
    n = DesKey(k).normalized()
    assert n.has_valid_parity()
    assert n.normalized() == n
    assert key_schedule(n) == key_schedule(k)


def test_key_format_errors():
    with pytest.raises(KeyFormatError):
        DesKey.from_hex("zz" * 8)
    with pytest.raises(KeyFormatError):
        DesKey.from_bytes(b"short")
    with pytest.raises(KeyFormatError):
        DesKey(-1)


def test_check_key_policies():
    bad_parity = DesKey.from_hex("133457799BBCDFF0")
    check_key(bad_parity)  # ignored by default
    with pytest.raises(ParityError):
        check_key(bad_parity, check_parity=True)

    weak = DesKey(tables.WEAK_KEYS[0])
    with pytest.warns(UserWarning, match="weak"):
        check_key(weak)
    with pytest.raises(WeakKeyError):
        check_key(weak, strict=True)
    with pytest.raises(WeakKeyError):
        check_key(DesKey(tables.SEMI_WEAK_KEYS[3]), strict=True)

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_key(DesKey.from_hex("133457799BBCDFF1"), check_parity=False, strict=True)


def test_weak_detection_ignores_parity():
    assert DesKey(0).is_weak  # 0000... normalizes to 0101...
    assert not DesKey.from_hex("133457799BBCDFF1").is_weak
