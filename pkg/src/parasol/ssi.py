"""Exact integer reference model for satellite-derived surface solar irradiation.

All quantities are integers at a single global fixed-point scale ``SCALE``:
a real value x is represented as round(x * SCALE).  The pipeline per sample t
and pixel i is

    rho = f * L            (apparent albedo, sensor counts times calibration)
    n   = rho * sigma0 - sigma1          (cloud index)
    K   = unit - n                       (clear-sky index, unit == SCALE)
    G_gnd[i] = (sum_t K[t][i] * g_cs[t]) * (g_prd // sum(g_cs))
    G   = sum_i G_gnd[i]

and a claim pays out iff G falls strictly below the policy threshold
theta = floor(g_e * epsilon_bp / SCALE).

Everything here is pure integer arithmetic with no rounding anywhere except
the single floor in the threshold.  The period factor g_prd / sum(g_cs) is
required to divide exactly so that the integer result matches the rational
one; policies violating that are refused rather than silently rounded.

Negative cloud-index or clear-sky-index values are representation-legal and
deliberately not clamped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionError, ParameterError, RangeError

# Global fixed-point denominator shared by model parameters, policy
# thresholds, and the constraint system.
SCALE = 10_000

# Raw sample values must fit an unsigned 64-bit word.
_U64_MAX = (1 << 64) - 1


def _check_vector(name: str, vec: tuple[int, ...], *, allow_negative: bool = False) -> None:
    if len(vec) == 0:
        raise DimensionError(f"{name} must be non-empty")
    for j, value in enumerate(vec):
        if not isinstance(value, int):
            raise ParameterError(f"{name}[{j}] is not an integer: {value!r}")
        if not allow_negative and value < 0:
            raise ParameterError(f"{name}[{j}] is negative: {value}")


@dataclass(frozen=True)
class ModelParams:
    """Calibrated model constants for one insured area.

    sigma0, sigma1: per-pixel affine cloud-index coefficients (length N,
        fixed-point at ``scale``).
    g_cs: clear-sky irradiation per sample instant (length T, Wh/m2).
    g_prd: clear-sky irradiation for the whole period (Wh/m2); must be an
        exact integer multiple of sum(g_cs).
    scale: the global fixed-point denominator.
    """

    sigma0: tuple[int, ...]
    sigma1: tuple[int, ...]
    g_cs: tuple[int, ...]
    g_prd: int
    scale: int = SCALE

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma0", tuple(self.sigma0))
        object.__setattr__(self, "sigma1", tuple(self.sigma1))
        object.__setattr__(self, "g_cs", tuple(self.g_cs))
        _check_vector("sigma0", self.sigma0)
        _check_vector("sigma1", self.sigma1)
        _check_vector("g_cs", self.g_cs)
        if len(self.sigma0) != len(self.sigma1):
            raise DimensionError(
                f"sigma0 and sigma1 lengths differ: {len(self.sigma0)} != {len(self.sigma1)}"
            )
        if self.scale < 1:
            raise ParameterError(f"scale must be positive, got {self.scale}")
        if self.g_prd < 0:
            raise ParameterError(f"g_prd is negative: {self.g_prd}")
        total_cs = sum(self.g_cs)
        if total_cs <= 0:
            raise ParameterError("sum of g_cs must be strictly positive")
        if self.g_prd % total_cs != 0:
            raise ParameterError(
                f"g_prd={self.g_prd} is not an exact multiple of sum(g_cs)={total_cs}; "
                "refusing a silently rounded period factor"
            )

    @property
    def n_pixels(self) -> int:
        return len(self.sigma0)

    @property
    def n_samples(self) -> int:
        return len(self.g_cs)

    @property
    def period_factor(self) -> int:
        """Exact integer g_prd / sum(g_cs)."""
        return self.g_prd // sum(self.g_cs)


@dataclass(frozen=True)
class RemoteSensingSample:
    """One satellite observation of the insured area.

    radiance: per-pixel sensor counts (length N).
    calibration: per-pixel calibration factors (length N, fixed-point).
    timestamp: observation instant, seconds since the Unix epoch (UTC).
    """

    radiance: tuple[int, ...]
    calibration: tuple[int, ...]
    timestamp: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "radiance", tuple(self.radiance))
        object.__setattr__(self, "calibration", tuple(self.calibration))
        _check_vector("radiance", self.radiance)
        _check_vector("calibration", self.calibration)
        if len(self.radiance) != len(self.calibration):
            raise DimensionError(
                f"radiance and calibration lengths differ: "
                f"{len(self.radiance)} != {len(self.calibration)}"
            )
        for name, vec in (("radiance", self.radiance), ("calibration", self.calibration)):
            for j, value in enumerate(vec):
                if value > _U64_MAX:
                    raise RangeError(f"{name}[{j}]={value} does not fit in 64 bits")

    @property
    def n_pixels(self) -> int:
        return len(self.radiance)


@dataclass(frozen=True)
class SsiResult:
    """Irradiation estimate with all per-sample intermediates retained."""

    per_pixel_ssi: tuple[int, ...]
    total_ssi: int
    rho: tuple[tuple[int, ...], ...] = field(repr=False)
    cloud: tuple[tuple[int, ...], ...] = field(repr=False)
    clear_sky: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self) -> None:
        if self.total_ssi != sum(self.per_pixel_ssi):
            raise ParameterError("total_ssi does not equal the sum of per_pixel_ssi")


@dataclass(frozen=True)
class ClaimDecision:
    """Outcome of comparing estimated irradiation against the policy trigger."""

    payable: bool
    threshold: int
    deficit: int


def apparent_albedo(calibration: tuple[int, ...], radiance: tuple[int, ...]) -> tuple[int, ...]:
    """Element-wise product rho = f * L."""
    if len(calibration) != len(radiance):
        raise DimensionError(
            f"calibration and radiance lengths differ: {len(calibration)} != {len(radiance)}"
        )
    return tuple(f * l for f, l in zip(calibration, radiance))


def cloud_index(rho: tuple[int, ...], params: ModelParams) -> tuple[int, ...]:
    """Affine cloud index n = rho * sigma0 - sigma1, element-wise, signed."""
    if len(rho) != params.n_pixels:
        raise DimensionError(f"rho has length {len(rho)}, expected {params.n_pixels}")
    return tuple(r * s0 - s1 for r, s0, s1 in zip(rho, params.sigma0, params.sigma1))


def clear_sky_index(n: tuple[int, ...], unit: int) -> tuple[int, ...]:
    """K = 1 - n with the constant 1 represented as ``unit`` (the fixed-point scale).

    Values above ``unit`` produce negative K; that is representation-legal
    and not clamped.
    """
    return tuple(unit - value for value in n)


def pixel_ssi(k_per_sample: tuple[tuple[int, ...], ...], params: ModelParams) -> tuple[int, ...]:
    """Per-pixel period irradiation from per-sample clear-sky indices.

    G_gnd[i] = (sum_t K[t][i] * g_cs[t]) * (g_prd / sum(g_cs)), exact in
    integers because ModelParams enforces the divisibility.
    """
    if len(k_per_sample) != params.n_samples:
        raise DimensionError(
            f"expected {params.n_samples} sample rows, got {len(k_per_sample)}"
        )
    for t, row in enumerate(k_per_sample):
        if len(row) != params.n_pixels:
            raise DimensionError(
                f"sample row {t} has length {len(row)}, expected {params.n_pixels}"
            )
    factor = params.period_factor
    return tuple(
        sum(k_per_sample[t][i] * params.g_cs[t] for t in range(params.n_samples)) * factor
        for i in range(params.n_pixels)
    )


def total_ssi(per_pixel: tuple[int, ...]) -> int:
    """Total irradiation over the insured area."""
    return sum(per_pixel)


def compute_ssi(samples: list[RemoteSensingSample], params: ModelParams) -> SsiResult:
    """Run the full estimation chain, retaining intermediates for witness use."""
    if len(samples) != params.n_samples:
        raise DimensionError(
            f"got {len(samples)} samples but params define {params.n_samples} instants"
        )
    for t, sample in enumerate(samples):
        if sample.n_pixels != params.n_pixels:
            raise DimensionError(
                f"sample {t} has {sample.n_pixels} pixels, params define {params.n_pixels}"
            )
    rho = tuple(apparent_albedo(s.calibration, s.radiance) for s in samples)
    cloud = tuple(cloud_index(row, params) for row in rho)
    clear = tuple(clear_sky_index(row, params.scale) for row in cloud)
    per_pixel = pixel_ssi(clear, params)
    return SsiResult(
        per_pixel_ssi=per_pixel,
        total_ssi=total_ssi(per_pixel),
        rho=rho,
        cloud=cloud,
        clear_sky=clear,
    )


def evaluate_claim(
    total: int,
    g_e: int,
    epsilon_bp: int,
    m_bits: int,
    scale: int = SCALE,
) -> ClaimDecision:
    """Decide payability: payable iff total < floor(g_e * epsilon_bp / scale).

    The comparison is strict; a total exactly at the threshold never pays.
    When payable, the deficit theta - total must fit in m_bits (otherwise
    the policy is misconfigured and we refuse rather than truncate).
    """
    if not 0 <= epsilon_bp <= scale:
        raise ParameterError(f"epsilon_bp must lie in [0, {scale}], got {epsilon_bp}")
    if not 1 <= m_bits <= 64:
        raise ParameterError(f"m_bits must lie in [1, 64], got {m_bits}")
    if g_e < 0:
        raise ParameterError(f"g_e is negative: {g_e}")
    threshold = (g_e * epsilon_bp) // scale
    payable = total < threshold
    deficit = threshold - total if payable else 0
    if payable and deficit >= (1 << m_bits):
        raise RangeError(
            f"deficit {deficit} does not fit in {m_bits} bits; policy misconfiguration"
        )
    return ClaimDecision(payable=payable, threshold=threshold, deficit=deficit)


def bit_decompose(x: int, m: int) -> tuple[int, ...]:
    """LSB-first binary decomposition of x into exactly m bits."""
    if x < 0:
        raise RangeError(f"cannot decompose negative value {x}")
    if x >= (1 << m):
        raise RangeError(f"{x} does not fit in {m} bits")
    return tuple((x >> i) & 1 for i in range(m))
