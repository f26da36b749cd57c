"""Deterministic signatures over the claim provenance digest."""

import hashlib

import pytest

from parasol.errors import ParameterError
from parasol.signatures import (
    SIGNATURE_BYTES,
    generate_keypair,
    key_id_of,
    sign,
    verify_signature,
)


def _digest(text: str) -> bytes:
    return hashlib.sha256(text.encode()).digest()


def test_keypair_is_deterministic():
    a = generate_keypair(b"seed-1")
    b = generate_keypair(b"seed-1")
    c = generate_keypair(b"seed-2")
    assert a == b
    assert a.public != c.public
    assert a.key_id == key_id_of(a.public)
    assert len(a.key_id) == 16


def test_signature_roundtrip_and_determinism():
    key = generate_keypair(b"seed-3")
    digest = _digest("message")
    sig1 = sign(key, digest)
    sig2 = sign(key, digest)
    assert sig1 == sig2
    assert len(sig1) == SIGNATURE_BYTES
    assert verify_signature(key.public, digest, sig1)


def test_signature_rejects_wrong_message_key_or_bytes():
    key = generate_keypair(b"seed-4")
    other = generate_keypair(b"seed-5")
    digest = _digest("message")
    sig = sign(key, digest)
    assert not verify_signature(key.public, _digest("other"), sig)
    assert not verify_signature(other.public, digest, sig)
    for i in range(0, SIGNATURE_BYTES, 7):
        bad = bytearray(sig)
        bad[i] ^= 0x01
        assert not verify_signature(key.public, digest, bytes(bad))


def test_verify_never_raises_on_malformed_inputs():
    key = generate_keypair(b"seed-6")
    digest = _digest("message")
    assert not verify_signature(key.public, digest, b"")
    assert not verify_signature(key.public, digest, b"\x00" * SIGNATURE_BYTES)
    assert not verify_signature(b"garbage", digest, sign(key, digest))
    assert not verify_signature(b"\xff" * 48, digest, sign(key, digest))


def test_sign_requires_32_byte_digest():
    key = generate_keypair(b"seed-7")
    with pytest.raises(ParameterError):
        sign(key, b"short")


def test_distinct_messages_distinct_signatures():
    key = generate_keypair(b"seed-8")
    signatures = {sign(key, _digest(f"m{i}")) for i in range(20)}
    assert len(signatures) == 20
