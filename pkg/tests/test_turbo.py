from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decbench.channel import bpsk_map, ebno_to_sigma, frame_rng, quantized_llr, transmit
from decbench.codes.turbo import lte_turbo_code, rsc_encode, turbo_demultiplex, turbo_encode, turbo_multiplex
from decbench.decoders.turbo import TurboDecoder, TurboIterCount, siso_max_log_map
from decbench.opmeter import ops_per_info_bit
from oracles import lte_rsc_reference, max_log_app_bruteforce


@settings(max_examples=40)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_rsc_matches_reference(bits):
    p, tx, tz = rsc_encode(bits)
    rp, rtx, rtz = lte_rsc_reference(bits)
    assert np.array_equal(p, rp) and np.array_equal(tx, rtx) and np.array_equal(tz, rtz)


def test_impulse_response():
    p, _, _ = rsc_encode([1] + [0] * 15)
    rp, _, _ = lte_rsc_reference([1] + [0] * 15)
    assert p.tolist() == rp.tolist()
    # feedback 13, feedforward 15: period-7 recursive response
    assert p[:8].tolist() == [1, 1, 1, 1, 0, 0, 1, 0]


def test_codeword_length_and_mux():
    code = lte_turbo_code(40)
    s, p1, p2, t = turbo_encode(np.zeros(40, dtype=np.uint8), code)
    x = turbo_multiplex(s, p1, p2, t, code)
    assert x.size == 3 * 40 + 12 and not x.any()
    u = np.random.default_rng(0).integers(0, 2, 40).astype(np.uint8)
    streams = turbo_encode(u, code)
    back = turbo_demultiplex(turbo_multiplex(*streams, code), code)
    for a, b in zip(streams, back):
        assert np.array_equal(a, b)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_siso_matches_bruteforce_app(seed):
    rng = np.random.default_rng(seed)
    K = 8
    ls, lp, la = (rng.integers(-15, 16, K) for _ in range(3))
    _, app, _ = siso_max_log_map(ls, lp, la, scale=1.0)
    assert np.array_equal(app, max_log_app_bruteforce(ls, lp, la))


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_codeword_flip_symmetry(seed):
    # flipping the LLR signs along a codeword flips the extrinsic wherever that codeword has a 1
    rng = np.random.default_rng(seed)
    K = 24
    u = rng.integers(0, 2, K).astype(np.uint8)
    p, tx, tz = rsc_encode(u)
    ls, lp, la = (rng.integers(-12, 13, K) for _ in range(3))
    t_s, t_p = rng.integers(-12, 13, 3), rng.integers(-12, 13, 3)
    sgn = lambda b: 1 - 2 * b.astype(np.int64)
    e0, _, _ = siso_max_log_map(ls, lp, la, tail_sys=t_s, tail_par=t_p)
    e1, _, _ = siso_max_log_map(ls * sgn(u), lp * sgn(p), la * sgn(u), tail_sys=t_s * sgn(tx), tail_par=t_p * sgn(tz))
    assert np.array_equal(e1, e0 * sgn(u))


def test_plain_negation_is_not_a_symmetry():
    # the all-ones word is not a codeword, so negating every LLR does not negate the extrinsic
    rng = np.random.default_rng(1)
    ls, lp, la = (rng.integers(-12, 13, 24) for _ in range(3))
    e0, _, _ = siso_max_log_map(ls, lp, la)
    e1, _, _ = siso_max_log_map(-ls, -lp, -la)
    assert not np.array_equal(e1, -e0)


def test_zero_scale_gives_zero_extrinsic():
    rng = np.random.default_rng(2)
    ls, lp, la = (rng.integers(-31, 32, 30) for _ in range(3))
    ext, _, _ = siso_max_log_map(ls, lp, la, scale=0.0)
    assert not ext.any()


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(0, 29), st.integers(-40, 40))
def test_renormalization_invariance(seed, step, off):
    rng = np.random.default_rng(seed)
    ls, lp, la = (rng.integers(-10, 11, 30) for _ in range(3))
    tx, tz = rng.integers(-10, 11, 3), rng.integers(-10, 11, 3)
    e0, a0, _ = siso_max_log_map(ls, lp, la, tail_sys=tx, tail_par=tz)
    e1, a1, _ = siso_max_log_map(ls, lp, la, tail_sys=tx, tail_par=tz, gamma_offset=(step, off))
    assert np.array_equal(e0, e1) and np.array_equal(a0, a1)


def test_bad_scale_rejected():
    with pytest.raises(ValueError):
        siso_max_log_map([1], [1], [0], scale=0.3)
    with pytest.raises(ValueError):
        TurboIterCount.from_iterations(1.25)
    with pytest.raises(ValueError):
        TurboIterCount(0)


def _noisy_frames(code, F, ebno, seed):
    rows, refs = [], []
    for f in range(F):
        rng = frame_rng(seed, f)
        u = rng.integers(0, 2, code.K).astype(np.uint8)
        x = turbo_multiplex(*turbo_encode(u, code), code)
        sigma = ebno_to_sigma(ebno, code.exact_rate)
        rows.append(quantized_llr(transmit(bpsk_map(x), sigma, rng), sigma))
        refs.append(u)
    return np.stack(rows), np.stack(refs)


def test_noiseless_and_moderate_snr_decoding():
    code = lte_turbo_code(256)
    dec = TurboDecoder(code)
    u = np.random.default_rng(3).integers(0, 2, 256).astype(np.uint8)
    x = (1 - 2 * turbo_multiplex(*turbo_encode(u, code), code).astype(np.int64)) * 8
    assert np.array_equal(dec.decode(x, TurboIterCount(2)).bits, u)
    llr, ref = _noisy_frames(code, 8, 2.0, 5)
    res = dec.decode(llr, TurboIterCount.from_iterations(6), reference=ref)
    assert (res.bits != ref).sum() == 0
    # per-half-iteration error counts never exceed the channel-decision count by the end
    assert (res.info_errors[:, -1] <= res.info_errors[:, 0]).all()


def test_punctured_rates_decode_noiseless():
    for rate in (Fraction(1, 2), Fraction(3, 4)):
        code = lte_turbo_code(120, rate)
        u = np.random.default_rng(4).integers(0, 2, 120).astype(np.uint8)
        x = turbo_multiplex(*turbo_encode(u, code), code)
        assert x.size == code.transmitted_length
        res = TurboDecoder(code).decode((1 - 2 * x.astype(np.int64)) * 8, TurboIterCount(4))
        assert np.array_equal(res.bits, u)


def test_ledger_linear_in_half_iterations():
    code = lte_turbo_code(512)
    llr, _ = _noisy_frames(code, 1, 0.5, 0)
    dec = TurboDecoder(code)
    led = {h: dec.decode(llr, TurboIterCount(h), early_stop=False).ledger for h in (2, 4, 6)}
    a, b, c = (led[h].as_array() for h in (2, 4, 6))
    assert np.array_equal(c - b, b - a) and np.array_equal(b, 2 * a)
    per_iter = ops_per_info_bit(led[2], 512)
    assert 100 <= per_iter <= 180


def test_early_stop_reduces_work_without_changing_clean_output():
    code = lte_turbo_code(256)
    llr, ref = _noisy_frames(code, 4, 3.0, 9)
    dec = TurboDecoder(code)
    full = dec.decode(llr, TurboIterCount(16), early_stop=False)
    es = dec.decode(llr, TurboIterCount(16), early_stop=True)
    assert (es.half_iterations_used < 16).all()
    assert np.array_equal(es.bits, ref) and np.array_equal(full.bits, ref)
