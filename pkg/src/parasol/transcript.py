"""Deterministic Fiat-Shamir transcript.

Framing per absorbed item: label bytes, 4-byte big-endian payload length,
payload. Challenges reduce the 32 SHA-256 digest bytes, read little-endian,
modulo the scalar-field order; no rejection loop is needed.
"""

from __future__ import annotations

import hashlib

from .curve import R

FE_BYTES = 32


def fe_to_bytes(v):
    """32-byte little-endian encoding of a scalar-field element."""
    return (int(v) % R).to_bytes(FE_BYTES, "little")


def fe_from_bytes(data):
    return int.from_bytes(data, "little") % R


def _frame(label, payload):
    lb = label.encode("utf-8")
    return lb + len(payload).to_bytes(4, "big") + payload


class Transcript:
    """Running SHA-256 state plus the raw absorbed byte sequence."""

    def __init__(self, domain):
        self.domain = domain
        self._hash = hashlib.sha256()
        self.absorbed = bytearray()
        self._eat(_frame("domain", domain.encode("utf-8")))

    def _eat(self, framed):
        self._hash.update(framed)
        self.absorbed.extend(framed)

    def absorb(self, label, payload):
        self._eat(_frame(label, bytes(payload)))

    def absorb_field(self, label, value):
        self.absorb(label, fe_to_bytes(value))

    def challenge_bytes(self, label):
        """32 bytes bound to everything absorbed so far; ratchets the state."""
        probe = self._hash.copy()
        probe.update(_frame("challenge:" + label, b""))
        digest = probe.digest()
        self._eat(_frame("ratchet:" + label, digest))
        return digest

    def challenge_field(self, label):
        return fe_from_bytes(self.challenge_bytes(label))

    def fork_seed(self, label):
        """Derivation seed that does not advance the main transcript."""
        probe = self._hash.copy()
        probe.update(_frame("fork:" + label, b""))
        return probe.digest()
