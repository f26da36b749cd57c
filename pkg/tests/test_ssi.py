"""Estimation-chain arithmetic against independent rational oracles."""

from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parasol.errors import DimensionError, ParameterError, RangeError
from parasol.ssi import (
    SCALE,
    ModelParams,
    RemoteSensingSample,
    apparent_albedo,
    bit_decompose,
    clear_sky_index,
    cloud_index,
    compute_ssi,
    evaluate_claim,
    pixel_ssi,
    total_ssi,
)

from conftest import random_measurement


# -- oracles (independent formulations, written before the assertions) -------


def rational_pixel_ssi(k_rows, g_cs, g_prd):
    """G_gnd per pixel in exact rational arithmetic."""
    factor = Fraction(g_prd, sum(g_cs))
    n = len(k_rows[0])
    return [
        factor * sum(Fraction(row[i]) * w for row, w in zip(k_rows, g_cs))
        for i in range(n)
    ]


def rational_decision(total, g_e, epsilon_bp, scale):
    """Payability from the rational threshold, floored independently."""
    theta = (Fraction(g_e) * Fraction(epsilon_bp, scale)).__floor__()
    return total < theta, theta


def oracle_bits(x, m):
    """LSB-first bits via string formatting."""
    return tuple(int(ch) for ch in format(x, f"0{m}b")[::-1])


# -- element-wise stages ------------------------------------------------------


def test_apparent_albedo_examples():
    assert apparent_albedo((1,), (0,)) == (0,)
    assert apparent_albedo((3,), (2,)) == (6,)
    assert apparent_albedo((2, 1), (3, 4)) == (6, 4)


def test_apparent_albedo_length_mismatch():
    with pytest.raises(DimensionError):
        apparent_albedo((1, 2), (3,))


def test_cloud_index_examples():
    def params_for(sigma0, sigma1):
        return ModelParams(sigma0=sigma0, sigma1=sigma1, g_cs=(1,), g_prd=1)

    assert cloud_index((0,), params_for((1,), (0,))) == (0,)
    assert cloud_index((6,), params_for((1,), (5,))) == (1,)
    assert cloud_index((4, 6), params_for((2, 1), (3, 5))) == (5, 1)


def test_cloud_index_length_mismatch():
    params = ModelParams(sigma0=(1, 1), sigma1=(0, 0), g_cs=(1,), g_prd=1)
    with pytest.raises(DimensionError):
        cloud_index((1,), params)


def test_clear_sky_index_examples():
    # unit scale 1 keeps the arithmetic visible
    assert clear_sky_index((0,), 1) == (1,)
    assert clear_sky_index((1,), 1) == (0,)
    assert clear_sky_index((5,), 1) == (-4,)


def test_pixel_ssi_hand_example():
    params = ModelParams(sigma0=(1,), sigma1=(0,), g_cs=(100, 300), g_prd=800)
    got = pixel_ssi(((1,), (0,)), params)
    assert got == (200,)
    assert [Fraction(v) for v in got] == rational_pixel_ssi(((1,), (0,)), (100, 300), 800)


def test_pixel_ssi_clear_sky_identity():
    params = ModelParams(sigma0=(1, 1, 1), sigma1=(0, 0, 0), g_cs=(10, 20), g_prd=90)
    assert pixel_ssi(((1, 1, 1), (1, 1, 1)), params) == (90, 90, 90)
    assert pixel_ssi(((0, 0, 0), (0, 0, 0)), params) == (0, 0, 0)


def test_pixel_ssi_requires_exact_division():
    with pytest.raises(ParameterError):
        ModelParams(sigma0=(1,), sigma1=(0,), g_cs=(100, 300), g_prd=900)


def test_total_ssi_examples():
    assert total_ssi((200,)) == 200
    assert total_ssi((0, 0, 0)) == 0
    assert total_ssi((200, 300, 500)) == 1000


def test_rational_oracle_on_random_draws():
    rng = Random(0x55101)
    for _ in range(1000):
        n = rng.randint(1, 4)
        t = rng.randint(1, 3)
        params, samples = random_measurement(rng, n, t)
        result = compute_ssi(list(samples), params)
        k_rows = result.clear_sky
        expected = rational_pixel_ssi(k_rows, params.g_cs, params.g_prd)
        assert all(Fraction(v) == e for v, e in zip(result.per_pixel_ssi, expected))
        assert result.total_ssi == sum(result.per_pixel_ssi)


# -- claim decision -----------------------------------------------------------


def test_evaluate_claim_hand_example():
    decision = evaluate_claim(100, 200, 6000, 16)
    assert decision.payable and decision.threshold == 120 and decision.deficit == 20
    assert rational_decision(100, 200, 6000, SCALE) == (True, 120)


def test_evaluate_claim_boundary_is_not_payable():
    decision = evaluate_claim(120, 200, 6000, 16)
    assert not decision.payable and decision.threshold == 120


def test_evaluate_claim_degenerate_zero():
    decision = evaluate_claim(0, 0, 10000, 16)
    assert not decision.payable and decision.threshold == 0


def test_evaluate_claim_deficit_overflow():
    with pytest.raises(RangeError):
        evaluate_claim(0, 10_000_000, SCALE, 8)


def test_evaluate_claim_validates_inputs():
    with pytest.raises(ParameterError):
        evaluate_claim(0, 1, SCALE + 1, 8)
    with pytest.raises(ParameterError):
        evaluate_claim(0, 1, -1, 8)
    with pytest.raises(ParameterError):
        evaluate_claim(0, 1, SCALE, 0)
    with pytest.raises(ParameterError):
        evaluate_claim(0, 1, SCALE, 65)
    with pytest.raises(ParameterError):
        evaluate_claim(0, -1, SCALE, 8)


@given(
    total=st.integers(min_value=-(10**9), max_value=10**9),
    g_e=st.integers(min_value=0, max_value=10**9),
    epsilon_bp=st.integers(min_value=0, max_value=SCALE),
)
def test_claim_strictness_matches_rational_oracle(total, g_e, epsilon_bp):
    expected_payable, expected_theta = rational_decision(total, g_e, epsilon_bp, SCALE)
    try:
        decision = evaluate_claim(total, g_e, epsilon_bp, 64)
    except RangeError:
        assert expected_payable and expected_theta - total >= (1 << 64)
        return
    assert decision.threshold == expected_theta
    assert decision.payable == expected_payable
    if decision.payable:
        assert 0 < decision.deficit == expected_theta - total


# -- bit decomposition --------------------------------------------------------


def test_bit_decompose_examples():
    assert bit_decompose(0, 4) == (0, 0, 0, 0)
    assert bit_decompose(15, 4) == (1, 1, 1, 1)
    assert bit_decompose(20, 8) == oracle_bits(20, 8) == (0, 0, 1, 0, 1, 0, 0, 0)


def test_bit_decompose_rejects_out_of_range():
    with pytest.raises(RangeError):
        bit_decompose(16, 4)
    with pytest.raises(RangeError):
        bit_decompose(-1, 4)


@given(m=st.integers(min_value=1, max_value=64), data=st.data())
def test_bit_recomposition(m, data):
    x = data.draw(st.integers(min_value=0, max_value=(1 << m) - 1))
    bits = bit_decompose(x, m)
    assert len(bits) == m and all(b in (0, 1) for b in bits)
    assert sum(b << i for i, b in enumerate(bits)) == x
    assert bits == oracle_bits(x, m)


# -- monotonicity -------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_increasing_radiance_weakly_decreases_total(seed):
    rng = Random(seed)
    params, samples = random_measurement(rng, rng.randint(1, 3), rng.randint(1, 3))
    base = compute_ssi(list(samples), params).total_ssi
    t = rng.randrange(len(samples))
    i = rng.randrange(params.n_pixels)
    bumped = list(samples)
    radiance = list(bumped[t].radiance)
    radiance[i] += rng.randint(1, 50)
    bumped[t] = RemoteSensingSample(
        radiance=tuple(radiance),
        calibration=bumped[t].calibration,
        timestamp=bumped[t].timestamp,
    )
    assert compute_ssi(bumped, params).total_ssi <= base


# -- structural validation ----------------------------------------------------


def test_model_params_validation():
    with pytest.raises(ParameterError):
        ModelParams(sigma0=(1,), sigma1=(-1,), g_cs=(1,), g_prd=1)
    with pytest.raises(DimensionError):
        ModelParams(sigma0=(1, 2), sigma1=(1,), g_cs=(1,), g_prd=1)
    with pytest.raises(DimensionError):
        ModelParams(sigma0=(), sigma1=(), g_cs=(1,), g_prd=1)
    with pytest.raises(ParameterError):
        ModelParams(sigma0=(1,), sigma1=(1,), g_cs=(0,), g_prd=0)


def test_sample_validation():
    with pytest.raises(DimensionError):
        RemoteSensingSample(radiance=(1, 2), calibration=(1,), timestamp=0)
    with pytest.raises(RangeError):
        RemoteSensingSample(radiance=(1 << 64,), calibration=(1,), timestamp=0)


def test_compute_ssi_checks_sample_count():
    params = ModelParams(sigma0=(1,), sigma1=(0,), g_cs=(1, 1), g_prd=2)
    sample = RemoteSensingSample(radiance=(1,), calibration=(1,), timestamp=0)
    with pytest.raises(DimensionError):
        compute_ssi([sample], params)
