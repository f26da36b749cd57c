"""Pairing-based commitment scheme for Laurent polynomials.

The reference string exposes powers g^(x^i), h^(x^i), h^(alpha x^i) for
i in [-d, d] and g^(alpha x^i) for the same range minus i = 0. Committing
uses only the alpha-shifted G1 powers, so a polynomial with a nonzero
constant coefficient has no representation: the missing element is what
enforces the constant-term exclusion, and commit() additionally rejects such
polynomials up front.

Commit(f) = g^(alpha f(x)). Open(f, z) returns (f(z), W = g^(w(x))) with
w(X) = (f(X) - f(z)) / (X - z), and verification checks

    e(W, h^(alpha x)) * e(g^value * W^(-z), h^alpha) == e(F, h)

which holds exactly when the opened value matches the committed polynomial.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field

from . import curve
from .curve import (
    G1_GEN,
    G2_GEN,
    R,
    fr,
    fr_inv,
    g1_from_uncompressed,
    g1_msm,
    g1_mul_gen,
    g1_neg,
    g1_to_uncompressed,
    g2_from_uncompressed,
    g2_mul_gen,
    g2_to_uncompressed,
    pairing,
    pairing_product_is_one,
)
from .errors import (
    ConstantTermError,
    DegreeError,
    EvaluationError,
    ParameterError,
    SerializationError,
)
from .poly import Laurent
from .transcript import Transcript

_MAGIC = b"PARASOLSRS1\x00"


@dataclass(frozen=True)
class GroupContext:
    """Descriptive handle for the pairing groups the scheme runs over."""

    name: str
    order: int
    g: tuple
    h: tuple

    @staticmethod
    def default():
        return GroupContext(name="bls12-381", order=R, g=G1_GEN, h=G2_GEN)


@dataclass(frozen=True)
class OpeningProof:
    """Claimed evaluation together with its witness point."""

    value: int
    witness: tuple | None


@dataclass
class Srs:
    """Structured reference string over the degree window [-d, max_degree]."""

    d: int
    max_degree: int
    g_x: list = field(repr=False)          # g^(x^i), index i + d
    g_alpha_x: list = field(repr=False)    # g^(alpha x^i), None at i = 0
    h_x: list = field(repr=False)          # h^(x^i)
    h_alpha_x: list = field(repr=False)    # h^(alpha x^i)
    gt_alpha: tuple = field(repr=False)    # e(g, h^alpha)

    def g_power(self, i):
        return self.g_x[i + self.d]

    def g_alpha_power(self, i):
        if i == 0:
            raise ConstantTermError("the alpha-shifted power at index 0 does not exist")
        return self.g_alpha_x[i + self.d]

    def h_power(self, i):
        return self.h_x[i + self.d]

    def h_alpha_power(self, i):
        return self.h_alpha_x[i + self.d]

    # -- binary format -----------------------------------------------------

    def to_bytes(self):
        out = [_MAGIC]
        out.append(self.d.to_bytes(4, "big"))
        out.append(self.max_degree.to_bytes(4, "big"))
        for pt in self.g_x:
            out.append(g1_to_uncompressed(pt))
        for i, pt in enumerate(self.g_alpha_x):
            out.append(bytes(96) if i == self.d else g1_to_uncompressed(pt))
        for pt in self.h_x:
            out.append(g2_to_uncompressed(pt))
        for pt in self.h_alpha_x:
            out.append(g2_to_uncompressed(pt))
        out.append(_gt_to_bytes(self.gt_alpha))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data):
        if data[: len(_MAGIC)] != _MAGIC:
            raise SerializationError("bad reference-string header")
        off = len(_MAGIC)
        d = int.from_bytes(data[off : off + 4], "big")
        max_degree = int.from_bytes(data[off + 4 : off + 8], "big")
        off += 8
        n = 2 * d + 1
        expected = len(_MAGIC) + 8 + n * 96 * 2 + n * 192 * 2 + 576
        if len(data) != expected:
            raise SerializationError("reference string truncated or oversized")

        def take(k):
            nonlocal off
            chunk = data[off : off + k]
            off += k
            return chunk

        g_x = [g1_from_uncompressed(take(96)) for _ in range(n)]
        g_alpha_x = []
        for i in range(n):
            chunk = take(96)
            g_alpha_x.append(None if i == d else g1_from_uncompressed(chunk))
        h_x = [g2_from_uncompressed(take(192)) for _ in range(n)]
        h_alpha_x = [g2_from_uncompressed(take(192)) for _ in range(n)]
        gt_alpha = _gt_from_bytes(take(576))
        srs = cls(d=d, max_degree=max_degree, g_x=g_x, g_alpha_x=g_alpha_x,
                  h_x=h_x, h_alpha_x=h_alpha_x, gt_alpha=gt_alpha)
        bad_alpha = any(pt is None for i, pt in enumerate(g_alpha_x) if i != d)
        if any(pt is None for pt in g_x) or bad_alpha or any(pt is None for pt in h_x + h_alpha_x):
            raise SerializationError("reference string contains identity elements")
        # Structural spot check binding the G1 and G2 tables to the same x.
        if not pairing_product_is_one(
            [(srs.g_power(1), srs.h_power(0)), (g1_neg(srs.g_power(0)), srs.h_power(1))]
        ):
            raise SerializationError("reference string tables are inconsistent")
        return srs

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def digest(self):
        return hashlib.sha256(self.to_bytes()).hexdigest()


def _gt_to_bytes(gt):
    parts = []
    for half in gt:
        for c2 in half:
            for c in c2:
                parts.append(int(c).to_bytes(48, "big"))
    return b"".join(parts)


def _gt_from_bytes(data):
    from gmpy2 import mpz

    vals = [mpz(int.from_bytes(data[i * 48 : (i + 1) * 48], "big")) for i in range(12)]
    it = iter(vals)
    return tuple(tuple((next(it), next(it)) for _ in range(3)) for _ in range(2))


def _derive_secrets(seed):
    """Trapdoor (x, alpha) from a seed, or from OS entropy when seed is None."""
    material = seed if seed is not None else secrets.token_bytes(32)
    tr = Transcript("parasol/srs-setup/v1")
    tr.absorb("seed", material)
    x = tr.challenge_field("x")
    alpha = tr.challenge_field("alpha")
    # Zero is astronomically unlikely; map it away to keep the powers defined.
    return (x or 1), (alpha or 1)


def setup(d, max_degree, seed=None):
    """Generate the reference string; the trapdoor is discarded.

    Deterministic when a seed is supplied (test mode); otherwise uses OS
    randomness. Requires 1 <= max_degree <= d.
    """
    if d < 1 or max_degree < 1 or max_degree > d:
        raise ParameterError(f"degree bounds must satisfy 1 <= max <= d, got d={d} max={max_degree}")
    x, alpha = _derive_secrets(seed)
    xinv = fr_inv(x)
    powers = [0] * (2 * d + 1)
    powers[d] = 1
    for i in range(1, d + 1):
        powers[d + i] = powers[d + i - 1] * x % R
        powers[d - i] = powers[d - i + 1] * xinv % R
    g_x = [g1_mul_gen(s) for s in powers]
    g_alpha_x = [None if i == d else g1_mul_gen(alpha * powers[i] % R) for i in range(2 * d + 1)]
    h_x = [g2_mul_gen(s) for s in powers]
    h_alpha_x = [g2_mul_gen(alpha * s % R) for s in powers]
    gt_alpha = pairing(G1_GEN, h_alpha_x[d])
    del x, alpha, xinv, powers
    srs = Srs(d=d, max_degree=max_degree, g_x=g_x, g_alpha_x=g_alpha_x,
              h_x=h_x, h_alpha_x=h_alpha_x, gt_alpha=gt_alpha)
    return GroupContext.default(), srs


def commit(srs, f):
    """Commit to a Laurent polynomial; equal polynomials commit equally."""
    if f[0] != 0:
        raise ConstantTermError("polynomial has a nonzero constant coefficient")
    if not f.is_zero() and (f.min_degree < -srs.d or f.max_degree > srs.max_degree):
        raise DegreeError(
            f"degree window [{f.min_degree}, {f.max_degree}] outside "
            f"[{-srs.d}, {srs.max_degree}]"
        )
    points = []
    scalars = []
    for e, c in f.coeffs.items():
        points.append(srs.g_alpha_power(e))
        scalars.append(c)
    return g1_msm(points, scalars)


def open_at(srs, f, z):
    """Opening proof for f at a nonzero point z."""
    z = fr(z)
    if z == 0:
        raise EvaluationError("openings at zero are undefined")
    if not f.is_zero() and (f.min_degree < -srs.d or f.max_degree > srs.max_degree):
        raise DegreeError("polynomial outside the reference-string window")
    value = f.evaluate(z) if not f.is_zero() else 0
    q = f.divide_linear(z) if not f.is_zero() else Laurent()
    points = []
    scalars = []
    for e, c in q.coeffs.items():
        points.append(srs.g_power(e))
        scalars.append(c)
    witness = g1_msm(points, scalars)
    return OpeningProof(value=value, witness=witness)


def _check_external_point(pt):
    if pt is not None and not curve.g1_in_subgroup(pt):
        raise SerializationError("group element fails the subgroup check")


def verify_open(srs, commitment, z, proof):
    """Check one opening proof. External points get full subgroup checks."""
    z = fr(z)
    if z == 0:
        raise EvaluationError("openings at zero are undefined")
    _check_external_point(commitment)
    _check_external_point(proof.witness)
    w = proof.witness
    left = g1_msm([G1_GEN, w], [fr(proof.value), (-z) % R]) if w is not None else g1_mul_gen(proof.value)
    pairs = []
    if w is not None:
        pairs.append((w, srs.h_alpha_power(1)))
    if left is not None:
        pairs.append((left, srs.h_alpha_power(0)))
    if commitment is not None:
        pairs.append((g1_neg(commitment), srs.h_power(0)))
    return pairing_product_is_one(pairs)


def verify_open_batch(srs, openings):
    """Check many openings with one pairing product.

    openings: iterable of (commitment, z, OpeningProof). Uses a random linear
    combination with weights derived from the openings themselves, so a batch
    passes exactly when every member passes (up to negligible probability).
    """
    items = list(openings)
    if not items:
        return True
    tr = Transcript("parasol/batch-openings/v1")
    for commitment, z, proof in items:
        _check_external_point(commitment)
        _check_external_point(proof.witness)
        tr.absorb("commitment", curve.g1_to_bytes(commitment))
        tr.absorb_field("z", z)
        tr.absorb_field("value", proof.value)
        tr.absorb("witness", curve.g1_to_bytes(proof.witness))
    gammas = [tr.challenge_field(f"gamma/{i}") for i in range(len(items))]
    w_pts, w_scalars = [], []
    mid_pts, mid_scalars = [], []
    c_pts, c_scalars = [], []
    for gamma, (commitment, z, proof) in zip(gammas, items):
        z = fr(z)
        if z == 0:
            raise EvaluationError("openings at zero are undefined")
        if proof.witness is not None:
            w_pts.append(proof.witness)
            w_scalars.append(gamma)
            mid_pts.append(proof.witness)
            mid_scalars.append(gamma * (R - z) % R)
        mid_pts.append(G1_GEN)
        mid_scalars.append(gamma * fr(proof.value) % R)
        if commitment is not None:
            c_pts.append(commitment)
            c_scalars.append((R - gamma) % R)
    pairs = []
    wsum = g1_msm(w_pts, w_scalars)
    if wsum is not None:
        pairs.append((wsum, srs.h_alpha_power(1)))
    midsum = g1_msm(mid_pts, mid_scalars)
    if midsum is not None:
        pairs.append((midsum, srs.h_alpha_power(0)))
    csum = g1_msm(c_pts, c_scalars)
    if csum is not None:
        pairs.append((csum, srs.h_power(0)))
    return pairing_product_is_one(pairs)
