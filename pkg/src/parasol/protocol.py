"""Non-interactive prover and verifier for the irradiation claim.

The prover holds the raw samples (authenticated by the data provider), the
model parameters, and the policy, and shows in zero knowledge that the
resulting witness satisfies the claim circuit.  Commitments follow the
split of r(X,1) into a data part (committed and signed by the provider) and
a local part carrying everything else plus a four-term blinding polynomial
at exponents below every witness slot.

Transcript (Fiat-Shamir) order:

    absorb policy digest, commit_r_raw, commit_r_local  ->  y
    absorb commit_t                                     ->  z

and the proof consists of exactly eight elements: commitments to r_local,
t, r_raw, and the five opened evaluations r_local(z), r_local(zy),
r_raw(z), r_raw(zy), t(z), each bundled with its opening witness.

The verifier recomputes the challenge vectors and transcript, checks the
provider signature over H(commit_r_raw || H(metadata)) with the metadata
taken from the policy (so data requested for the wrong area or instants
fails the signature check), batch-verifies the five openings, evaluates
s(z,y) and k(y) from public data, and accepts iff

    t(z,y) = (r_local(z,1) + r_raw(z,1))
             (r_local(zy,1) + r_raw(zy,1) + s(z,y)) - k(y).

Every failure is a reject with one of the reason codes bad-signature,
bad-opening, equation-mismatch, transcript-mismatch.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from random import Random

from .circuit import (
    CircuitShape,
    ClaimInputs,
    build_linear_constraints,
    build_polynomials,
    build_witness,
    check_constraints_direct,
    derive_challenge_vectors,
    k_value,
    s_value,
    split_r,
)
from .commitments import OpeningProof, Srs, commit, open_at, verify_open_batch
from .curve import R, g1_from_bytes, g1_to_bytes
from .errors import ProvenanceError, ProvingError, SerializationError
from .poly import Laurent
from .provider import AreaRect, DataResponse, provenance_digest
from .signatures import verify_signature
from .ssi import ModelParams, compute_ssi, evaluate_claim
from .transcript import Transcript

_CLAIM_DOMAIN = "parasol/claim/v1"
_PROOF_MAGIC = b"PARASOLZKP1\x00"

MIX_TERMS = 4


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    reason: str


@dataclass(frozen=True)
class ClaimContext:
    """Public instance data the verifier derives from the policy."""

    shape: CircuitShape
    params: ModelParams
    threshold: int
    policy_digest: bytes
    dataset_id: str
    area: AreaRect
    timestamps: tuple[int, ...]
    rsp_public: bytes


@dataclass(frozen=True)
class ClaimProof:
    """The eight-element proof, in canonical order."""

    shape: CircuitShape
    commit_r_local: bytes
    commit_t: bytes
    r_local_at_z: OpeningProof
    r_local_at_zy: OpeningProof
    commit_r_raw: bytes
    r_raw_at_z: OpeningProof
    r_raw_at_zy: OpeningProof
    t_at_z: OpeningProof

    def to_bytes(self) -> bytes:
        parts = [
            _PROOF_MAGIC,
            struct.pack(
                ">IIII",
                self.shape.n_pixels,
                self.shape.n_samples,
                self.shape.m_bits,
                self.shape.witness_length,
            ),
        ]
        for element in (
            self.commit_r_local,
            self.commit_t,
            _evaluation_bytes(self.r_local_at_z),
            _evaluation_bytes(self.r_local_at_zy),
            self.commit_r_raw,
            _evaluation_bytes(self.r_raw_at_z),
            _evaluation_bytes(self.r_raw_at_zy),
            _evaluation_bytes(self.t_at_z),
        ):
            parts.append(struct.pack(">I", len(element)))
            parts.append(element)
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ClaimProof":
        if not data.startswith(_PROOF_MAGIC):
            raise SerializationError("bad proof magic")
        offset = len(_PROOF_MAGIC)
        if len(data) < offset + 16:
            raise SerializationError("truncated proof header")
        n, t, m, length = struct.unpack_from(">IIII", data, offset)
        offset += 16
        try:
            shape = CircuitShape(n_pixels=n, n_samples=t, m_bits=m)
        except Exception as exc:
            raise SerializationError(f"bad proof shape: {exc}") from exc
        if shape.witness_length != length:
            raise SerializationError("proof header length does not match its shape")
        elements = []
        for _ in range(8):
            if len(data) < offset + 4:
                raise SerializationError("truncated proof element")
            (size,) = struct.unpack_from(">I", data, offset)
            offset += 4
            if len(data) < offset + size:
                raise SerializationError("truncated proof element")
            elements.append(data[offset : offset + size])
            offset += size
        if offset != len(data):
            raise SerializationError("trailing bytes after proof")
        for idx in (0, 1, 4):
            if len(elements[idx]) != 48:
                raise SerializationError("commitment element must be 48 bytes")
        return cls(
            shape=shape,
            commit_r_local=elements[0],
            commit_t=elements[1],
            r_local_at_z=_evaluation_from_bytes(elements[2]),
            r_local_at_zy=_evaluation_from_bytes(elements[3]),
            commit_r_raw=elements[4],
            r_raw_at_z=_evaluation_from_bytes(elements[5]),
            r_raw_at_zy=_evaluation_from_bytes(elements[6]),
            t_at_z=_evaluation_from_bytes(elements[7]),
        )


def _evaluation_bytes(opening: OpeningProof) -> bytes:
    return opening.value.to_bytes(32, "little") + g1_to_bytes(opening.witness)


def _evaluation_from_bytes(data: bytes) -> OpeningProof:
    if len(data) != 80:
        raise SerializationError("evaluation element must be 80 bytes")
    value = int.from_bytes(data[:32], "little")
    if value >= R:
        raise SerializationError("evaluation value out of range")
    return OpeningProof(value=value, witness=g1_from_bytes(data[32:]))


def _claim_transcript(policy_digest: bytes, commit_r_raw: bytes, commit_r_local: bytes) -> Transcript:
    tr = Transcript(_CLAIM_DOMAIN)
    tr.absorb("policy", policy_digest)
    tr.absorb("commit-r-raw", commit_r_raw)
    tr.absorb("commit-r-local", commit_r_local)
    return tr


def challenge_seed(policy_digest: bytes, commit_r_raw: bytes) -> bytes:
    """Seed for the constraint challenge vectors, shared by both sides."""
    return policy_digest + commit_r_raw


def prove(
    srs: Srs,
    inputs: ClaimInputs,
    response: DataResponse,
    policy_digest: bytes,
    rng: Random,
) -> ClaimProof:
    """Produce a claim proof, refusing whenever the claim does not hold.

    The provider response must commit to exactly the samples in ``inputs``;
    any difference raises ProvenanceError.  A witness that fails the
    constraint system raises ProvingError instead of emitting a proof.
    """
    shape = inputs.shape
    witness = build_witness(inputs)

    result = compute_ssi(list(inputs.samples), inputs.params)
    decision = evaluate_claim(
        result.total_ssi,
        inputs.g_e,
        inputs.epsilon_bp,
        inputs.m_bits,
        inputs.params.scale,
    )
    challenges = derive_challenge_vectors(
        challenge_seed(policy_digest, response.commit_r_raw), shape
    )
    constraints = build_linear_constraints(
        shape, inputs.params, decision.threshold, challenges
    )
    if not check_constraints_direct(witness, constraints):
        raise ProvingError("witness does not satisfy the constraint system")

    polys = build_polynomials(witness, constraints, shape)
    r_raw, r_local_base = split_r(polys.r_poly, shape)
    if g1_to_bytes(commit(srs, r_raw)) != response.commit_r_raw:
        raise ProvenanceError(
            "provider commitment does not match the data used for the witness"
        )

    length = shape.witness_length
    mix = Laurent(
        {-(2 * length + i): rng.randrange(R) for i in range(1, MIX_TERMS + 1)}
    )
    r_local = r_local_base + mix
    r_full = polys.r_poly + mix
    commit_r_local = g1_to_bytes(commit(srs, r_local))

    tr = _claim_transcript(policy_digest, response.commit_r_raw, commit_r_local)
    y = tr.challenge_field("y")

    s_y = polys.s_poly(y)
    t_poly = r_full * (r_full.scale_exponents(y) + s_y) - Laurent.monomial(
        0, k_value(constraints, y)
    )
    if t_poly[0] != 0:
        raise ProvingError("constant coefficient of t does not vanish")
    commit_t = g1_to_bytes(commit(srs, t_poly))

    tr.absorb("commit-t", commit_t)
    z = tr.challenge_field("z")
    zy = z * y % R

    return ClaimProof(
        shape=shape,
        commit_r_local=commit_r_local,
        commit_t=commit_t,
        r_local_at_z=open_at(srs, r_local, z),
        r_local_at_zy=open_at(srs, r_local, zy),
        commit_r_raw=response.commit_r_raw,
        r_raw_at_z=open_at(srs, r_raw, z),
        r_raw_at_zy=open_at(srs, r_raw, zy),
        t_at_z=open_at(srs, t_poly, z),
    )


def verify(srs: Srs, ctx: ClaimContext, proof: ClaimProof, signature: bytes) -> VerifyResult:
    """Check a claim proof against the policy's public data.

    Never raises on adversarial input: every failure is a reject carrying
    one of the documented reason codes.
    """
    if proof.shape != ctx.shape:
        return VerifyResult(False, "transcript-mismatch")

    digest = provenance_digest(
        proof.commit_r_raw, ctx.dataset_id, ctx.area, ctx.timestamps
    )
    if not verify_signature(ctx.rsp_public, digest, signature):
        return VerifyResult(False, "bad-signature")

    try:
        c_local = g1_from_bytes(proof.commit_r_local)
        c_t = g1_from_bytes(proof.commit_t)
        c_raw = g1_from_bytes(proof.commit_r_raw)
    except SerializationError:
        return VerifyResult(False, "bad-opening")

    challenges = derive_challenge_vectors(
        challenge_seed(ctx.policy_digest, proof.commit_r_raw), ctx.shape
    )
    try:
        constraints = build_linear_constraints(
            ctx.shape, ctx.params, ctx.threshold, challenges
        )
    except Exception:
        return VerifyResult(False, "transcript-mismatch")

    tr = _claim_transcript(ctx.policy_digest, proof.commit_r_raw, proof.commit_r_local)
    y = tr.challenge_field("y")
    tr.absorb("commit-t", proof.commit_t)
    z = tr.challenge_field("z")
    zy = z * y % R

    openings = [
        (c_local, z, proof.r_local_at_z),
        (c_local, zy, proof.r_local_at_zy),
        (c_raw, z, proof.r_raw_at_z),
        (c_raw, zy, proof.r_raw_at_zy),
        (c_t, z, proof.t_at_z),
    ]
    try:
        if not verify_open_batch(srs, openings):
            return VerifyResult(False, "bad-opening")
    except SerializationError:
        return VerifyResult(False, "bad-opening")

    s_zy = s_value(constraints, z, y)
    k_y = k_value(constraints, y)
    lhs = proof.t_at_z.value
    r_z = (proof.r_local_at_z.value + proof.r_raw_at_z.value) % R
    r_zy = (proof.r_local_at_zy.value + proof.r_raw_at_zy.value) % R
    rhs = (r_z * ((r_zy + s_zy) % R) - k_y) % R
    if lhs != rhs:
        return VerifyResult(False, "equation-mismatch")
    return VerifyResult(True, "ok")
