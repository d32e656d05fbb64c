import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from decbench.channel import (
    ChannelConfig,
    awgn,
    bpsk_map,
    channel_llr,
    ebno_to_sigma,
    frame_rng,
    qam16_demap,
    qam16_map,
    qam16_points,
    quantized_llr,
    transmit,
    uncoded_bpsk_ber,
)
from oracles import q_function


def test_bpsk_map():
    assert list(bpsk_map([0, 1, 0])) == [1.0, -1.0, 1.0]


@given(st.lists(st.integers(0, 1), min_size=1, max_size=50))
def test_bpsk_flipping_bits_flips_signs(bits):
    b = np.array(bits)
    assert np.array_equal(bpsk_map(1 - b), -bpsk_map(b))


def test_awgn_domain_and_bypass():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        awgn(np.ones(4), 0.0, rng)
    with pytest.raises(ValueError):
        awgn(np.ones(4), -1.0, rng)
    x = bpsk_map([0, 1, 1])
    assert np.array_equal(transmit(x, 0.0, rng), x)


def test_noise_mean_and_std():
    z = awgn(np.zeros(1_000_000), 1.0, np.random.default_rng(5))
    assert abs(z.mean()) < 5e-3
    assert abs(z.std() - 1.0) < 5e-3


def test_streams_are_pure_functions_of_seed_and_index():
    a = frame_rng(7, 3).standard_normal(10)
    b = frame_rng(7, 3).standard_normal(10)
    c = frame_rng(7, 4).standard_normal(10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_channel_llr():
    assert channel_llr(0.0, 1.0) == 0
    assert channel_llr(1.0, 1.0) == 2.0
    y = np.linspace(-3, 3, 61)
    assert np.array_equal(np.sign(channel_llr(y, 0.7)), np.sign(y))


def test_sigma_formula():
    s = ebno_to_sigma(3.0, Fraction(1, 2))
    assert math.isclose(s * s, 1 / (2 * 0.5 * 10 ** 0.3))
    # doubling the rate halves the noise variance
    assert math.isclose(ebno_to_sigma(2.0, Fraction(2, 3)) ** 2 * 2, ebno_to_sigma(2.0, Fraction(1, 3)) ** 2)
    assert ebno_to_sigma(math.inf, 1) == 0.0
    cfg = ChannelConfig("16QAM", 4.0, Fraction(1, 2), 1)
    assert math.isclose(cfg.sigma ** 2, 1 / (2 * 0.5 * 4 * 10 ** 0.4))
    assert cfg.to_dict()["rate"] == "1/2"


def test_channel_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig("8PSK")
    with pytest.raises(ValueError):
        ChannelConfig(rate=Fraction(3, 2))


def test_quantized_llr_noiseless_saturates():
    q = quantized_llr(bpsk_map([0, 1]), 0.0)
    assert list(q) == [31, -31]


def test_qam16_constellation():
    pts = qam16_points()
    assert pts.size == 16
    assert math.isclose(np.mean(np.abs(pts) ** 2), 1.0)
    assert qam16_map([0, 0, 0, 0])[0] == pytest.approx((3 + 3j) / math.sqrt(10))
    # Gray: horizontally or vertically adjacent points differ in one bit
    nib = np.arange(16)
    for a in nib:
        for b in nib:
            d = abs(pts[a] - pts[b]) * math.sqrt(10)
            if math.isclose(d, 2.0):
                assert bin(a ^ b).count("1") == 1


def test_qam16_demapper_recovers_noiseless_bits():
    nib = np.arange(16)
    bits = ((nib[:, None] >> np.arange(3, -1, -1)) & 1).reshape(-1)
    llr = qam16_demap(qam16_map(bits), 0.3)
    assert np.array_equal((llr < 0).astype(int), bits)


def test_uncoded_ber_closed_form():
    assert uncoded_bpsk_ber(4.0) == pytest.approx(q_function(math.sqrt(2 * 10 ** 0.4)))
    assert uncoded_bpsk_ber(4.0) == pytest.approx(1.25e-2, rel=1e-2)
