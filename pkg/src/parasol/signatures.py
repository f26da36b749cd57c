"""Deterministic ECDSA over the package's G1 group.

Signatures bind the data provider's polynomial commitment to the request
metadata.  The nonce is derived from the secret key and message digest with
the HMAC-SHA256 construction of RFC 6979, so identical inputs always yield
identical 64-byte signatures and fixtures stay reproducible.

Keys: secret scalar d in [1, r-1], public point Q = d G serialized in the
48-byte compressed form.  Signature: r || s, each 32 bytes big-endian, with
r = (k G).x mod r_group and s = k^-1 (h + r d).
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

from .curve import (
    R,
    fr_inv,
    g1_add_points,
    g1_from_bytes,
    g1_mul,
    g1_mul_gen,
    g1_to_bytes,
)
from .errors import ParameterError, SerializationError
from .transcript import Transcript

SIGNATURE_BYTES = 64
_QLEN_BITS = R.bit_length()  # 255


def _bits2int(data: bytes) -> int:
    value = int.from_bytes(data, "big")
    excess = len(data) * 8 - _QLEN_BITS
    if excess > 0:
        value >>= excess
    return value


def _int2octets(value: int) -> bytes:
    return value.to_bytes(32, "big")


def _bits2octets(data: bytes) -> bytes:
    return _int2octets(_bits2int(data) % R)


@dataclass(frozen=True)
class SigningKey:
    """Secret scalar with its public point and short identifier."""

    secret: int
    public: bytes
    key_id: str


def key_id_of(public: bytes) -> str:
    """Short stable identifier for a public key."""
    return hashlib.sha256(public).hexdigest()[:16]


def generate_keypair(seed: bytes) -> SigningKey:
    """Derive a keypair deterministically from a seed."""
    tr = Transcript("parasol/ecdsa-keygen/v1")
    tr.absorb("seed", seed)
    secret = tr.challenge_field("d") or 1
    public = g1_to_bytes(g1_mul_gen(secret))
    return SigningKey(secret=secret, public=public, key_id=key_id_of(public))


def _deterministic_nonce(secret: int, digest: bytes) -> int:
    v = b"\x01" * 32
    k = b"\x00" * 32
    k = hmac.new(k, v + b"\x00" + _int2octets(secret) + _bits2octets(digest), hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    k = hmac.new(k, v + b"\x01" + _int2octets(secret) + _bits2octets(digest), hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    while True:
        v = hmac.new(k, v, hashlib.sha256).digest()
        candidate = _bits2int(v)
        if 1 <= candidate < R:
            return candidate
        k = hmac.new(k, v + b"\x00", hashlib.sha256).digest()
        v = hmac.new(k, v, hashlib.sha256).digest()


def sign(key: SigningKey, digest: bytes) -> bytes:
    """Sign a 32-byte digest; returns the 64-byte r || s encoding."""
    if len(digest) != 32:
        raise ParameterError(f"expected a 32-byte digest, got {len(digest)} bytes")
    h = _bits2int(digest) % R
    nonce = _deterministic_nonce(key.secret, digest)
    while True:
        point = g1_mul_gen(nonce)
        r_val = int(point[0]) % R
        if r_val != 0:
            s_val = fr_inv(nonce) * ((h + r_val * key.secret) % R) % R
            if s_val != 0:
                return _int2octets(r_val) + _int2octets(s_val)
        # astronomically unlikely; re-derive from a shifted nonce
        nonce = nonce % (R - 1) + 1


def verify_signature(public: bytes, digest: bytes, signature: bytes) -> bool:
    """Check a 64-byte signature over a 32-byte digest; never raises on bad input."""
    if len(digest) != 32 or len(signature) != SIGNATURE_BYTES:
        return False
    try:
        q_point = g1_from_bytes(public)
    except SerializationError:
        return False
    if q_point is None:
        return False
    r_val = int.from_bytes(signature[:32], "big")
    s_val = int.from_bytes(signature[32:], "big")
    if not (1 <= r_val < R and 1 <= s_val < R):
        return False
    h = _bits2int(digest) % R
    w = fr_inv(s_val)
    point = g1_add_points(g1_mul_gen(h * w % R), g1_mul(q_point, r_val * w % R))
    if point is None:
        return False
    return int(point[0]) % R == r_val
