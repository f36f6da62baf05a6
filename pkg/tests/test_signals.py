import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lregen import metrics, signals
from lregen.signals import (ConstantAlpha, ExponentialAlpha, FeedbackAlpha, NoiseSource, ThetaProfile,
                            eval_alpha, noise_amplitude_for_snr)

H = 1e-3


def grid(horizon, h=H):
    return np.arange(int(round(horizon / h)) + 1) * h


def test_delta1_values():
    assert signals.delta1(0.0) == 0.5
    assert signals.delta1(1.0) == pytest.approx(0.5 * math.exp(-1), rel=1e-15)
    assert signals.delta1(1.0) == pytest.approx(0.18393972, abs=1e-8)
    v = signals.delta1(grid(40))
    assert np.all(np.diff(v) < 0) and v[-1] < 1e-17


def test_delta2_values_and_breakpoint():
    assert signals.delta2(2.0) == 0.5
    assert signals.delta2(7.0) == 0.0
    assert signals.delta2(5.0) == 0.5
    # grid time 5000*h must take the earlier piece despite rounding
    assert signals.delta2(5000 * H) == 0.5
    assert signals.delta2(5001 * H) == 0.0


def test_delta3_values():
    assert signals.delta3(0.0) == 1.0
    assert signals.delta3(4.5) == pytest.approx(0.1, abs=1e-15)
    # not integrable: the running L1 mass keeps growing like log(2T+1)/2
    for T in (10.0, 100.0):
        assert metrics.l1_mass(signals.delta3(grid(T, 1e-2)), 1e-2) == pytest.approx(0.5 * math.log(2 * T + 1), rel=1e-3)


def test_delta4_values():
    assert signals.delta4(5.0) == pytest.approx(1.0, abs=1e-15)
    assert signals.delta4(13.0) == 0.0
    assert abs(signals.delta4(10.0)) < 1e-15


def test_scalar_and_array_evaluation_agree():
    t = np.array([0.0, 0.3, 5.0, 5.5, 12.0, 12.5])
    for sig in signals.DELTAS.values():
        np.testing.assert_array_equal(sig(t), [sig(float(x)) for x in t])
        assert isinstance(sig(0.3), float)


@pytest.mark.parametrize("key,bound", [("delta1", 0.5), ("delta2", 0.5), ("delta3", 1.0), ("delta4", 1.0)])
def test_declared_bounds(key, bound):
    sig = signals.get_signal(key)
    assert sig.bound == bound
    assert np.max(np.abs(sig(grid(40)))) <= bound


def test_square_integrable_energies():
    assert metrics.total_energy(signals.delta1(grid(30)), H) == pytest.approx(1 / 8, abs=1e-4)
    # the breakpoint interval adds h/2 * 0.25 under the trapezoid rule, so use a finer grid
    h = 5e-4
    assert metrics.total_energy(signals.delta2(grid(30, h)), h) == pytest.approx(1.25, abs=1e-4)


@pytest.mark.parametrize("key", list(signals.DELTAS))
def test_interval_exciting_not_persistently_exciting(key):
    v = signals.get_signal(key)(grid(200, 1e-2))
    assert metrics.cumulative_energy(v, 1e-2)[500] > 0.1
    energies = metrics.window_energies(v, 10.0, 1e-2)
    assert energies[-1] < 1e-3
    assert energies[-1] < energies[0] / 100


def test_unknown_and_custom_keys():
    with pytest.raises(KeyError, match="delta1"):
        signals.get_signal("delta9")
    with pytest.raises(NotImplementedError):
        signals.get_signal("custom:sin(t)")


def test_eval_alpha():
    assert eval_alpha(ConstantAlpha(1.0), 3.0, 7.0, 9.0) == 1.0
    fb = FeedbackAlpha(alpha0_scale=1.0, alpha0_rate=0.1, k=0.1)
    assert eval_alpha(fb, 0.0, 2.0, 3.0) == pytest.approx(0.4, abs=1e-15)
    no_fb = FeedbackAlpha(1.0, 0.1, 0.0)
    assert eval_alpha(no_fb, 2.0, 5.0, 5.0) == pytest.approx(math.exp(-0.2))
    assert eval_alpha(ExponentialAlpha(2.0, 0.5), 2.0) == pytest.approx(2 * math.exp(-1))
    with pytest.raises(ValueError):
        FeedbackAlpha(k=-1.0)


@pytest.mark.parametrize("text", ["const:1.0", "exp:1.0,0.1", "feedback:1.0,0.1,0.1"])
def test_alpha_text_round_trip(text):
    assert signals.format_alpha(signals.parse_alpha(text)) == text


def test_theta_profile():
    prof = ThetaProfile(((0.0, -5.0), (10.0, -4.0)))
    assert prof(0.0) == -5.0
    assert prof(10.0) == -5.0
    assert prof(10000 * H) == -5.0
    assert prof(10.0005) == -4.0
    assert ThetaProfile.parse(str(prof)) == prof
    assert prof.max_abs == 5.0
    with pytest.raises(ValueError):
        ThetaProfile(((1.0, 2.0),))
    with pytest.raises(ValueError):
        ThetaProfile(((0.0, 1.0), (3.0, 2.0), (3.0, 1.0)))


def test_noise_amplitude_for_snr():
    assert noise_amplitude_for_snr(6.25, 20.0) == pytest.approx(math.sqrt(3 * 0.0625))
    assert noise_amplitude_for_snr(6.25, 20.0) == pytest.approx(0.4330, abs=1e-4)
    assert noise_amplitude_for_snr(0.0, 20.0) == 0.0
    assert noise_amplitude_for_snr(6.25, math.inf) == 0.0
    assert noise_amplitude_for_snr(6.25, 200.0) < 1e-9
    with pytest.raises(ValueError):
        noise_amplitude_for_snr(-1.0, 20.0)


def test_noise_uniform_power_matches_snr():
    a = noise_amplitude_for_snr(6.25, 20.0)
    seq = NoiseSource(a, 0.01, seed=3).samples(200_000)
    assert np.mean(seq**2) == pytest.approx(0.0625, rel=0.02)


def test_noise_sample_and_hold():
    src = NoiseSource(0.5, 0.01, seed=11)
    t = grid(1.0)
    v = src(t)
    assert np.all(np.abs(v) <= 0.5)
    # constant inside each 10-step block, changes at block boundaries
    blocks = v[:-1].reshape(-1, 10)
    assert np.all(blocks == blocks[:, :1])
    assert np.count_nonzero(np.diff(blocks[:, 0])) > 90


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 500))
def test_noise_reproducible(seed, n):
    a, b = NoiseSource(0.2, 0.01, seed), NoiseSource(0.2, 0.01, seed)
    b.samples(3 * n)  # growing the cache must not change earlier samples
    np.testing.assert_array_equal(a.samples(n), b.samples(n))
    t = grid(n * 0.01)
    np.testing.assert_array_equal(a(t), NoiseSource(0.2, 0.01, seed)(t))


def test_no_noise_is_zero():
    src = NoiseSource()
    assert not src.active
    assert src(1.3) == 0.0
