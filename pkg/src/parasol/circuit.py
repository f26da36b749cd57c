"""Arithmetization of the irradiation claim as a Sonic-style constraint system.

The claim "total estimated irradiation G fell strictly below the policy
threshold theta" is encoded as witness vectors a, b, c of length
L = N(6T+2) + M + 2 satisfying the Hadamard constraint a o b = c and seven
linear constraints a.u_q + b.v_q + c.w_q = k_q, where N is the pixel count,
T the sample count and M the deficit bit width.

Witness layout (0-based offsets):

    upper   [0, 2NT)            per batch t: radiance L_t then calibration f_t;
                                only vector a is populated here, and these are
                                exactly the coefficients the data provider
                                commits to.
    middle  [2NT, 2NT+4NT+2N+M) seven Hadamard rows:
                                  row0  f_t        * L_t        = D1_t
                                  row1  D1_t       * sigma0     = D2_t
                                  row2  (1-D2+s1)_t* 1          = K_t
                                  row3  K_t        * g_cs_t     = D3_t
                                  row4  D4         * 1/sum(gcs) = D5
                                  row5  D5         * g_prd      = D6
                                  row6  B          * (1-B)      = 0
    lower   last 2 entries of a: (G, theta - G); b, c zero.

The constant 1 in row2 is the fixed-point unit (the global scale), while the
ones multiplying row4/row5 style constants are literal field ones supplied
by public constraint rows.  D5 = D4 / sum(g_cs) is a field element, not an
integer; multiplying by g_prd restores the exact integer per-pixel result
because policies require sum(g_cs) | g_prd.

The seven linear constraints:

    q=1  copy constraints tying upper data to middle rows, weighted by
         random challenge vectors, plus the affine K definition
    q=2  D4 = sum_t D3_t
    q=3  public constant blocks of b (sigma0, ones, g_cs, 1/sum(gcs), g_prd)
    q=4  G = sum(D6)
    q=5  G + (theta - G) = theta
    q=6  theta - G = sum_j 2^j B_j
    q=7  sum(B) + sum(1-B) = M

Challenge vectors r_1..r_{8T+4} are Fiat-Shamir derived; all but the last
have length N, the last has length M.  For an honest witness the coefficient
of X^0 in t(X, y) = r(X,1)(r(X,y) + s(X,y)) - k(y) vanishes for every y.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .curve import R, fr_inv
from .errors import DimensionError, WitnessUnavailable
from .poly import Laurent
from .ssi import (
    ModelParams,
    RemoteSensingSample,
    bit_decompose,
    compute_ssi,
    evaluate_claim,
)
from .transcript import Transcript

Q_CONSTRAINTS = 7

_CHALLENGE_DOMAIN = "parasol/challenges/v1"


@dataclass(frozen=True)
class CircuitShape:
    """Dimensions of one claim circuit instance."""

    n_pixels: int
    n_samples: int
    m_bits: int

    def __post_init__(self) -> None:
        if self.n_pixels < 1 or self.n_samples < 1 or self.m_bits < 1:
            raise DimensionError(
                f"shape dimensions must be positive, got "
                f"({self.n_pixels}, {self.n_samples}, {self.m_bits})"
            )

    @property
    def witness_length(self) -> int:
        n, t, m = self.n_pixels, self.n_samples, self.m_bits
        return n * (6 * t + 2) + m + 2

    @property
    def upper_length(self) -> int:
        return 2 * self.n_pixels * self.n_samples

    @property
    def n_challenge_vectors(self) -> int:
        return 8 * self.n_samples + 4

    # upper segment: batch t holds radiance then calibration
    def upper_radiance_offset(self, t: int) -> int:
        return 2 * self.n_pixels * t

    def upper_calibration_offset(self, t: int) -> int:
        return 2 * self.n_pixels * t + self.n_pixels

    # middle Hadamard rows; rows 0..3 have one block of N per sample,
    # rows 4 and 5 one block of N, row 6 one block of M
    def row_offset(self, row: int, t: int = 0) -> int:
        n, ts = self.n_pixels, self.n_samples
        base = self.upper_length
        if row < 4:
            return base + row * n * ts + n * t
        if row in (4, 5):
            return base + 4 * n * ts + (row - 4) * n
        if row == 6:
            return base + 4 * n * ts + 2 * n
        raise DimensionError(f"no Hadamard row {row}")

    @property
    def total_offset(self) -> int:
        """Index of G in the lower segment."""
        return self.witness_length - 2

    @property
    def deficit_offset(self) -> int:
        return self.witness_length - 1


@dataclass(frozen=True)
class ClaimInputs:
    """Everything needed to build a witness for one claim."""

    samples: tuple[RemoteSensingSample, ...]
    params: ModelParams
    g_e: int
    epsilon_bp: int
    m_bits: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))

    @property
    def shape(self) -> CircuitShape:
        return CircuitShape(self.params.n_pixels, len(self.samples), self.m_bits)


@dataclass(frozen=True)
class WitnessVectors:
    """Field-element witness vectors, each of length L."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self) -> None:
        if not len(self.a) == len(self.b) == len(self.c):
            raise DimensionError("witness vectors must share one length")


@dataclass(frozen=True)
class LinearConstraintSet:
    """Sparse coefficient vectors for the seven linear constraints.

    u, v, w hold one dict per constraint mapping witness index to field
    coefficient; k holds the seven constants.  challenges keeps the vectors
    the coefficients were built from so provers and verifiers can be checked
    against each other.
    """

    shape: CircuitShape
    u: tuple[dict[int, int], ...]
    v: tuple[dict[int, int], ...]
    w: tuple[dict[int, int], ...]
    k: tuple[int, ...]
    challenges: tuple[tuple[int, ...], ...]
    degenerate: bool = field(default=False)


def derive_challenge_vectors(
    transcript_seed: bytes, shape: CircuitShape
) -> tuple[tuple[int, ...], ...]:
    """Derive the 8T+4 challenge vectors deterministically from a seed.

    Vectors 1..8T+3 have length N; the final vector has length M (it weighs
    the M-long zero block of c).  Prover and verifier call this with the
    same seed and obtain identical vectors.
    """
    tr = Transcript(_CHALLENGE_DOMAIN)
    tr.absorb("seed", transcript_seed)
    vectors: list[tuple[int, ...]] = []
    for index in range(shape.n_challenge_vectors):
        length = shape.m_bits if index == shape.n_challenge_vectors - 1 else shape.n_pixels
        vectors.append(tuple(tr.challenge_field("r") for _ in range(length)))
    return tuple(vectors)


def build_witness(inputs: ClaimInputs) -> WitnessVectors:
    """Assemble witness vectors for a payable claim.

    Raises WitnessUnavailable when the claim is not payable: the deficit is
    then negative and no M-bit decomposition of it exists.
    """
    params = inputs.params
    shape = inputs.shape
    result = compute_ssi(list(inputs.samples), params)
    decision = evaluate_claim(
        result.total_ssi, inputs.g_e, inputs.epsilon_bp, inputs.m_bits, params.scale
    )
    if not decision.payable:
        raise WitnessUnavailable(
            f"total {result.total_ssi} is not below threshold {decision.threshold}; "
            "no valid bit decomposition exists"
        )
    bits = bit_decompose(decision.deficit, inputs.m_bits)

    n, t_count, m = shape.n_pixels, shape.n_samples, shape.m_bits
    length = shape.witness_length
    a = [0] * length
    b = [0] * length
    c = [0] * length

    s_inv = fr_inv(sum(params.g_cs) % R)

    for t in range(t_count):
        sample = inputs.samples[t]
        rho = result.rho[t]
        clear = result.clear_sky[t]
        for i in range(n):
            radiance = sample.radiance[i] % R
            calib = sample.calibration[i] % R
            d1 = rho[i] % R
            d2 = rho[i] * params.sigma0[i] % R
            k_val = clear[i] % R

            a[shape.upper_radiance_offset(t) + i] = radiance
            a[shape.upper_calibration_offset(t) + i] = calib

            row = shape.row_offset(0, t) + i
            a[row], b[row], c[row] = calib, radiance, d1
            row = shape.row_offset(1, t) + i
            a[row], b[row], c[row] = d1, params.sigma0[i] % R, d2
            row = shape.row_offset(2, t) + i
            a[row], b[row], c[row] = k_val, 1, k_val
            row = shape.row_offset(3, t) + i
            g_cs_t = params.g_cs[t] % R
            a[row], b[row], c[row] = k_val, g_cs_t, k_val * g_cs_t % R

    for i in range(n):
        d4 = sum(result.clear_sky[t][i] * params.g_cs[t] for t in range(t_count)) % R
        d5 = d4 * s_inv % R
        d6 = d5 * (params.g_prd % R) % R
        # the exactness condition makes the field value match the integer model
        assert d6 == result.per_pixel_ssi[i] % R
        row = shape.row_offset(4) + i
        a[row], b[row], c[row] = d4, s_inv, d5
        row = shape.row_offset(5) + i
        a[row], b[row], c[row] = d5, params.g_prd % R, d6

    for j in range(m):
        row = shape.row_offset(6) + j
        a[row], b[row], c[row] = bits[j], (1 - bits[j]) % R, 0

    a[shape.total_offset] = result.total_ssi % R
    a[shape.deficit_offset] = decision.deficit % R

    return WitnessVectors(a=tuple(a), b=tuple(b), c=tuple(c))


def build_linear_constraints(
    shape: CircuitShape,
    params: ModelParams,
    threshold: int,
    challenges: tuple[tuple[int, ...], ...],
) -> LinearConstraintSet:
    """Transcribe the seven linear constraints for the given instance.

    threshold is the integer claim trigger theta; it becomes the constant
    of constraint q=5.
    """
    n, t_count, m = shape.n_pixels, shape.n_samples, shape.m_bits
    if params.n_pixels != n or params.n_samples != t_count:
        raise DimensionError(
            f"params dimensions ({params.n_pixels}, {params.n_samples}) do not "
            f"match shape ({n}, {t_count})"
        )
    if len(challenges) != shape.n_challenge_vectors:
        raise DimensionError(
            f"expected {shape.n_challenge_vectors} challenge vectors, got {len(challenges)}"
        )
    for index, vec in enumerate(challenges):
        expected = m if index == len(challenges) - 1 else n
        if len(vec) != expected:
            raise DimensionError(
                f"challenge vector {index + 1} has length {len(vec)}, expected {expected}"
            )
    if all(value == 0 for vec in challenges for value in vec):
        warnings.warn("all challenge vectors are zero; copy constraints are vacuous")
        degenerate = True
    else:
        degenerate = False

    # challenges[i] holds the vector indexed i+1 in the construction
    def r(index: int) -> tuple[int, ...]:
        return challenges[index - 1]

    u: list[dict[int, int]] = [dict() for _ in range(Q_CONSTRAINTS)]
    v: list[dict[int, int]] = [dict() for _ in range(Q_CONSTRAINTS)]
    w: list[dict[int, int]] = [dict() for _ in range(Q_CONSTRAINTS)]
    k = [0] * Q_CONSTRAINTS

    unit = params.scale % R
    s_inv = fr_inv(sum(params.g_cs) % R)
    g_prd = params.g_prd % R

    # q=1: copy constraints and the affine K definition
    k1 = 0
    for t in range(t_count):
        r_f = r(t + 1)
        r_l = r(t_count + t + 1)
        r_d1 = r(2 * t_count + t + 1)
        r_d2 = r(3 * t_count + t + 1)
        r_k = r(4 * t_count + t + 1)
        for i in range(n):
            u[0][shape.upper_radiance_offset(t) + i] = -r_l[i] % R
            u[0][shape.upper_calibration_offset(t) + i] = -r_f[i] % R
            u[0][shape.row_offset(0, t) + i] = r_f[i]
            v[0][shape.row_offset(0, t) + i] = r_l[i]
            u[0][shape.row_offset(1, t) + i] = -r_d1[i] % R
            w[0][shape.row_offset(0, t) + i] = r_d1[i]
            u[0][shape.row_offset(2, t) + i] = r_d2[i]
            w[0][shape.row_offset(1, t) + i] = r_d2[i]
            u[0][shape.row_offset(3, t) + i] = -r_k[i] % R
            w[0][shape.row_offset(2, t) + i] = r_k[i]
            k1 += r_d2[i] * ((unit + params.sigma1[i]) % R)
    r_d5 = r(8 * t_count + 1)
    for i in range(n):
        u[0][shape.row_offset(5) + i] = -r_d5[i] % R
        w[0][shape.row_offset(4) + i] = r_d5[i]
    k[0] = k1 % R

    # q=2: D4 equals the sum of the D3 rows
    for i in range(n):
        u[1][shape.row_offset(4) + i] = R - 1
    for t in range(t_count):
        for i in range(n):
            w[1][shape.row_offset(3, t) + i] = 1
    k[1] = 0

    # q=3: pin the public constant blocks of b
    k3 = 0
    for t in range(t_count):
        r_s0 = r(5 * t_count + t + 1)
        r_one = r(6 * t_count + t + 1)
        r_gcs = r(7 * t_count + t + 1)
        for i in range(n):
            v[2][shape.row_offset(1, t) + i] = r_s0[i]
            v[2][shape.row_offset(2, t) + i] = r_one[i]
            v[2][shape.row_offset(3, t) + i] = r_gcs[i]
            k3 += r_s0[i] * (params.sigma0[i] % R) + r_one[i]
            k3 += r_gcs[i] * (params.g_cs[t] % R)
    r_sinv = r(8 * t_count + 2)
    r_gprd = r(8 * t_count + 3)
    for i in range(n):
        v[2][shape.row_offset(4) + i] = r_sinv[i]
        v[2][shape.row_offset(5) + i] = r_gprd[i]
        k3 += r_sinv[i] * s_inv + r_gprd[i] * g_prd
    r_zero = r(8 * t_count + 4)
    for j in range(m):
        w[2][shape.row_offset(6) + j] = r_zero[j]
    k[2] = k3 % R

    # q=4: G equals the sum of the D6 row
    u[3][shape.total_offset] = R - 1
    for i in range(n):
        w[3][shape.row_offset(5) + i] = 1
    k[3] = 0

    # q=5: G plus the deficit reproduces the public threshold
    u[4][shape.total_offset] = 1
    u[4][shape.deficit_offset] = 1
    k[4] = threshold % R

    # q=6: the deficit equals its bit recomposition
    for j in range(m):
        u[5][shape.row_offset(6) + j] = pow(2, j, R)
    u[5][shape.deficit_offset] = R - 1
    k[5] = 0

    # q=7: bit count balance between B and 1-B
    for j in range(m):
        u[6][shape.row_offset(6) + j] = 1
        v[6][shape.row_offset(6) + j] = 1
    k[6] = m % R

    return LinearConstraintSet(
        shape=shape,
        u=tuple(u),
        v=tuple(v),
        w=tuple(w),
        k=tuple(k),
        challenges=tuple(tuple(vec) for vec in challenges),
        degenerate=degenerate,
    )


def check_constraints_direct(witness: WitnessVectors, constraints: LinearConstraintSet) -> bool:
    """Non-succinct oracle: verify a o b = c and all seven dot products."""
    a, b, c = witness.a, witness.b, witness.c
    if len(a) != constraints.shape.witness_length:
        return False
    for ai, bi, ci in zip(a, b, c):
        if ai * bi % R != ci % R:
            return False
    for q in range(Q_CONSTRAINTS):
        total = 0
        for i, coeff in constraints.u[q].items():
            total += a[i] * coeff
        for i, coeff in constraints.v[q].items():
            total += b[i] * coeff
        for i, coeff in constraints.w[q].items():
            total += c[i] * coeff
        if total % R != constraints.k[q]:
            return False
    return True


@dataclass(frozen=True)
class ConstraintPolynomials:
    """Polynomial view of one instance: r(X,1) plus s/k/t evaluators."""

    shape: CircuitShape
    constraints: LinearConstraintSet
    r_poly: Laurent

    def r_at(self, x: int) -> int:
        return self.r_poly.evaluate(x)

    def s_poly(self, y: int) -> Laurent:
        """s(X, y) as a Laurent polynomial in X."""
        big_u, big_v, big_w = _uvw_at_y(self.constraints, y)
        length = self.shape.witness_length
        coeffs: dict[int, int] = {}
        for i in range(length):
            e = i + 1
            if big_u[i]:
                coeffs[-e] = (coeffs.get(-e, 0) + big_u[i]) % R
            if big_v[i]:
                coeffs[e] = (coeffs.get(e, 0) + big_v[i]) % R
            if big_w[i]:
                coeffs[e + length] = (coeffs.get(e + length, 0) + big_w[i]) % R
        return Laurent({e: c for e, c in coeffs.items() if c})

    def k_value(self, y: int) -> int:
        return k_value(self.constraints, y)

    def t_poly(self, y: int) -> Laurent:
        """t(X, y) = r(X,1) (r(X,y) + s(X,y)) - k(y)."""
        r_y = self.r_poly.scale_exponents(y)
        product = self.r_poly * (r_y + self.s_poly(y))
        return product - Laurent.monomial(0, self.k_value(y))

    def t_at(self, z: int, y: int) -> int:
        return self.t_poly(y).evaluate(z)


def _uvw_at_y(
    constraints: LinearConstraintSet, y: int
) -> tuple[list[int], list[int], list[int]]:
    """Dense u_i(y), v_i(y), w_i(y) arrays, including w's -Y^i - Y^-i terms."""
    length = constraints.shape.witness_length
    big_u = [0] * length
    big_v = [0] * length
    big_w = [0] * length
    y_pow = pow(y, length, R)
    for q in range(Q_CONSTRAINTS):
        y_pow = y_pow * y % R
        for i, coeff in constraints.u[q].items():
            big_u[i] = (big_u[i] + y_pow * coeff) % R
        for i, coeff in constraints.v[q].items():
            big_v[i] = (big_v[i] + y_pow * coeff) % R
        for i, coeff in constraints.w[q].items():
            big_w[i] = (big_w[i] + y_pow * coeff) % R
    # the Hadamard constraints contribute -Y^i - Y^-i to every w_i
    y_inv = fr_inv(y)
    fwd, back = 1, 1
    for i in range(length):
        fwd = fwd * y % R
        back = back * y_inv % R
        big_w[i] = (big_w[i] - fwd - back) % R
    return big_u, big_v, big_w


def k_value(constraints: LinearConstraintSet, y: int) -> int:
    """k(y) = sum_q y^{q+L} k_q."""
    length = constraints.shape.witness_length
    total = 0
    y_pow = pow(y, length, R)
    for q in range(Q_CONSTRAINTS):
        y_pow = y_pow * y % R
        total += y_pow * constraints.k[q]
    return total % R


def s_value(constraints: LinearConstraintSet, z: int, y: int) -> int:
    """Evaluate s(z, y) directly from the sparse constraints, O(L Q)."""
    big_u, big_v, big_w = _uvw_at_y(constraints, y)
    length = constraints.shape.witness_length
    z_inv = fr_inv(z)
    total = 0
    fwd, back = 1, 1
    for i in range(length):
        fwd = fwd * z % R
        back = back * z_inv % R
        total += big_u[i] * back + big_v[i] * fwd
    # w terms sit at exponents i + L
    shift = pow(z, length, R)
    fwd = shift
    for i in range(length):
        fwd = fwd * z % R
        total += big_w[i] * fwd
    return total % R


def build_polynomials(
    witness: WitnessVectors, constraints: LinearConstraintSet, shape: CircuitShape
) -> ConstraintPolynomials:
    """Build r(X,1) from the witness and bundle it with the s/k/t evaluators."""
    length = shape.witness_length
    if len(witness.a) != length:
        raise DimensionError(
            f"witness length {len(witness.a)} does not match shape ({length})"
        )
    coeffs: dict[int, int] = {}
    for i in range(length):
        e = i + 1
        if witness.a[i]:
            coeffs[e] = witness.a[i]
        if witness.b[i]:
            coeffs[-e] = witness.b[i]
        if witness.c[i]:
            coeffs[-e - length] = witness.c[i]
    return ConstraintPolynomials(
        shape=shape, constraints=constraints, r_poly=Laurent(coeffs)
    )


def t_constant_coefficient(
    witness: WitnessVectors, constraints: LinearConstraintSet, y: int
) -> int:
    """X^0 coefficient of t(X, y), computed from the constraint sums directly.

    Equals sum_i (a_i b_i - c_i)(y^i + y^-i)
         + sum_q y^{q+L} (a.u_q + b.v_q + c.w_q - k_q)
    and therefore vanishes exactly when every constraint holds or the
    violations cancel at this particular y.
    """
    a, b, c = witness.a, witness.b, witness.c
    length = constraints.shape.witness_length
    y_inv = fr_inv(y)
    total = 0
    fwd, back = 1, 1
    for i in range(length):
        fwd = fwd * y % R
        back = back * y_inv % R
        total += (a[i] * b[i] - c[i]) * (fwd + back)
    y_pow = pow(y, length, R)
    for q in range(Q_CONSTRAINTS):
        y_pow = y_pow * y % R
        dot = 0
        for i, coeff in constraints.u[q].items():
            dot += a[i] * coeff
        for i, coeff in constraints.v[q].items():
            dot += b[i] * coeff
        for i, coeff in constraints.w[q].items():
            dot += c[i] * coeff
        total += y_pow * (dot - constraints.k[q])
    return total % R


def raw_data_polynomial(
    samples: tuple[RemoteSensingSample, ...] | list[RemoteSensingSample],
    shape: CircuitShape,
) -> Laurent:
    """The data polynomial: upper-segment coefficients at exponents 1..2NT.

    Per batch t the radiance entries occupy exponents 2Nt+1 .. 2Nt+N and the
    calibration entries 2Nt+N+1 .. 2Nt+2N.  This is the polynomial the data
    provider commits to and signs.
    """
    if len(samples) != shape.n_samples:
        raise DimensionError(
            f"got {len(samples)} samples, shape defines {shape.n_samples}"
        )
    coeffs: dict[int, int] = {}
    for t, sample in enumerate(samples):
        if sample.n_pixels != shape.n_pixels:
            raise DimensionError(
                f"sample {t} has {sample.n_pixels} pixels, shape defines {shape.n_pixels}"
            )
        for i in range(shape.n_pixels):
            radiance = sample.radiance[i] % R
            calib = sample.calibration[i] % R
            if radiance:
                coeffs[shape.upper_radiance_offset(t) + i + 1] = radiance
            if calib:
                coeffs[shape.upper_calibration_offset(t) + i + 1] = calib
    return Laurent(coeffs)


def split_r(r_poly: Laurent, shape: CircuitShape) -> tuple[Laurent, Laurent]:
    """Split r(X,1) into (raw data part, everything else).

    The raw part collects the coefficients at the upper-segment exponents
    1..2NT; the local part is the remainder, so raw + local = r.
    """
    upper = shape.upper_length
    raw: dict[int, int] = {}
    local: dict[int, int] = {}
    for e, coeff in r_poly.coeffs.items():
        if 1 <= e <= upper:
            raw[e] = coeff
        else:
            local[e] = coeff
    return Laurent(raw), Laurent(local)
