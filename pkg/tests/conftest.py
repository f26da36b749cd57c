"""Shared fixtures and instance generators for the test suite.

The session reference string is sized for the largest witness used
anywhere in the suite (length 98); smaller instances simply use a slice
of its degree range.  Generators return plain tuples so tests can
destructure what they need.
"""

from __future__ import annotations

from random import Random

import pytest

from parasol.circuit import ClaimInputs
from parasol.commitments import setup
from parasol.ssi import (
    SCALE,
    ModelParams,
    RemoteSensingSample,
    compute_ssi,
    evaluate_claim,
)

MAX_WITNESS_LENGTH = 98


@pytest.fixture(scope="session")
def srs():
    _, reference = setup(
        4 * MAX_WITNESS_LENGTH + 8,
        3 * MAX_WITNESS_LENGTH,
        seed=b"parasol-test-srs",
    )
    return reference


@pytest.fixture(scope="session")
def small_srs():
    _, reference = setup(24, 12, seed=b"parasol-test-small-srs")
    return reference


def random_measurement(rng: Random, n_pixels: int, n_samples: int):
    """Random params plus samples; no payability constraint."""
    sigma0 = tuple(rng.randint(1, 3) for _ in range(n_pixels))
    sigma1 = tuple(rng.randint(0, SCALE) for _ in range(n_pixels))
    g_cs = tuple(rng.randint(1, 50) for _ in range(n_samples))
    g_prd = sum(g_cs) * rng.randint(1, 20)
    params = ModelParams(sigma0=sigma0, sigma1=sigma1, g_cs=g_cs, g_prd=g_prd)
    samples = tuple(
        RemoteSensingSample(
            radiance=tuple(rng.randint(0, 500) for _ in range(n_pixels)),
            calibration=tuple(rng.randint(0, 50) for _ in range(n_pixels)),
            timestamp=100 * (t + 1),
        )
        for t in range(n_samples)
    )
    return params, samples


def payable_terms(rng: Random, total: int, m_bits: int):
    """(g_e, epsilon_bp) whose threshold exceeds ``total`` by a deficit
    that fits in ``m_bits``; None when no such policy exists."""
    room = (1 << m_bits) - 1
    if total < -room:
        return None
    low = max(0, total + 1)
    high = total + room
    for _ in range(32):
        epsilon_bp = rng.randint(1, SCALE)
        target = rng.randint(low, high)
        g_e = -(-target * SCALE // epsilon_bp)  # ceiling division
        threshold = g_e * epsilon_bp // SCALE
        if low <= threshold <= high:
            return g_e, epsilon_bp
    return max(0, total + 1), SCALE


def payable_instance(rng: Random, n_pixels: int, n_samples: int, m_bits: int) -> ClaimInputs:
    """Claim inputs guaranteed payable with an in-range deficit."""
    while True:
        params, samples = random_measurement(rng, n_pixels, n_samples)
        total = compute_ssi(list(samples), params).total_ssi
        terms = payable_terms(rng, total, m_bits)
        if terms is None:
            continue
        g_e, epsilon_bp = terms
        decision = evaluate_claim(total, g_e, epsilon_bp, m_bits)
        assert decision.payable
        return ClaimInputs(
            samples=samples,
            params=params,
            g_e=g_e,
            epsilon_bp=epsilon_bp,
            m_bits=m_bits,
        )


def non_payable_instance(rng: Random, n_pixels: int, n_samples: int, m_bits: int) -> ClaimInputs:
    """Claim inputs whose estimate sits at or above the threshold."""
    while True:
        params, samples = random_measurement(rng, n_pixels, n_samples)
        total = compute_ssi(list(samples), params).total_ssi
        if total < 0:
            continue  # any threshold pays when the estimate is negative
        threshold = rng.randint(0, total)
        inputs = ClaimInputs(
            samples=samples,
            params=params,
            g_e=threshold,
            epsilon_bp=SCALE,
            m_bits=m_bits,
        )
        assert not evaluate_claim(total, threshold, SCALE, m_bits).payable
        return inputs
