"""Parallel Triple-DES ECB engine with a scalar reference backend and benchmark harness."""

from .des_core import DesKey, RoundKeySet, decrypt_block, encrypt_block, key_schedule
from .dispatch import (
    Backend,
    Batch,
    DispatchConfig,
    EcbEngine,
    PaddingMode,
    StreamReport,
    decrypt_batch,
    decrypt_stream,
    encrypt_batch,
    encrypt_stream,
    pkcs7_pad,
    pkcs7_unpad,
    plan_dispatch,
)
from .tdes import (
    KeyingOption,
    TripleKey,
    TripleSchedule,
    tdes_decrypt_block,
    tdes_encrypt_block,
    triple_schedule,
)

__all__ = [
    "Backend", "Batch", "DesKey", "DispatchConfig", "EcbEngine", "KeyingOption",
    "PaddingMode", "RoundKeySet", "StreamReport", "TripleKey", "TripleSchedule",
    "decrypt_batch", "decrypt_block", "decrypt_stream", "encrypt_batch", "encrypt_block",
    "encrypt_stream", "key_schedule", "pkcs7_pad", "pkcs7_unpad", "plan_dispatch",
    "tdes_decrypt_block", "tdes_encrypt_block", "triple_schedule",
]
