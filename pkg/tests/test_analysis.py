import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bincues import (AnalysisError, SampleBuffer, ShadowParams, SilentSignalError,
                     StereoBuffer, TransferFunction, ValidationError, analyze_capture,
                     apply_fractional_delay, band_itd, calibration_check, cross_correlation,
                     estimate_itd, gen_pink_noise, gen_sine, head_shadow_ild,
                     ild_spectrum_summary, transfer_function)

SR = 48000
ONE_SAMPLE = 1.0 / SR


def apply_spectral_gain(buf, gain_db_fn):
    """Filter a buffer by a smooth magnitude curve (test construction helper)."""
    spectrum = np.fft.rfft(buf.samples)
    freqs = np.fft.rfftfreq(len(buf), 1.0 / buf.sample_rate)
    freqs[0] = freqs[1]
    spectrum *= 10.0 ** (gain_db_fn(freqs) / 20.0)
    return SampleBuffer(np.fft.irfft(spectrum, len(buf)), buf.sample_rate)


def delayed_copy(buf, delay_s):
    return apply_fractional_delay(buf, delay_s)


# --- transfer_function ------------------------------------------------------

def test_tf_identity(pink_5s):
    tf = transfer_function(pink_5s, pink_5s)
    assert np.max(np.abs(tf.magnitude_db)) < 1e-6
    assert np.max(np.abs(tf.phase_deg)) < 1e-6
    assert np.min(tf.coherence) > 1.0 - 1e-6
    assert tf.broadband_delay_s == 0.0


def test_tf_half_gain(pink_5s):
    half = SampleBuffer(0.5 * pink_5s.samples, SR)
    tf = transfer_function(pink_5s, half)
    expected = 20.0 * math.log10(0.5)
    np.testing.assert_allclose(tf.magnitude_db, expected, atol=1e-6)
    assert np.max(np.abs(tf.phase_deg)) < 1e-6
    assert np.min(tf.coherence) > 1.0 - 1e-6


def test_tf_pure_delay_phase_law(pink_5s):
    tau = 0.5e-3  # 24 samples
    delayed = delayed_copy(pink_5s, tau)
    tf = transfer_function(pink_5s, delayed)

    bin_500 = int(np.argmin(np.abs(tf.freqs - 500.0)))
    expected = -360.0 * tf.freqs[bin_500] * tau
    assert tf.phase_deg[bin_500] == pytest.approx(expected, abs=0.5)

    # unwrapped phase is linear in frequency with slope -360*tau deg/Hz
    keep = tf.coherence > 0.9
    phase = np.unwrap(np.radians(tf.phase_deg[keep]))
    freqs = tf.freqs[keep]
    slope, intercept = np.polyfit(freqs, phase, 1)
    fitted = slope * freqs + intercept
    ss_res = np.sum((phase - fitted) ** 2)
    ss_tot = np.sum((phase - phase.mean()) ** 2)
    assert 1.0 - ss_res / ss_tot >= 0.999
    assert np.degrees(slope) == pytest.approx(-360.0 * tau, rel=1e-3)

    assert tf.broadband_delay_s == pytest.approx(tau, abs=0.1 * ONE_SAMPLE)
    band = (tf.freqs >= 100) & (tf.freqs <= 16000)
    assert np.min(tf.coherence[band]) > 0.999


def test_tf_lti_filter_keeps_high_coherence(pink_5s):
    shaped = apply_spectral_gain(pink_5s, lambda f: -6.0 / (1.0 + (2000.0 / f) ** 2))
    tf = transfer_function(pink_5s, shaped)
    band = (tf.freqs >= 100) & (tf.freqs <= 16000)
    assert np.min(tf.coherence[band]) > 0.999


def test_tf_parseval(pink_5s):
    from scipy import signal as sps
    freqs, psd = sps.welch(pink_5s.samples, fs=SR, window="hann", nperseg=8192,
                           noverlap=4096, detrend=False)
    band_power = np.sum(psd) * (freqs[1] - freqs[0])
    time_power = np.mean(pink_5s.samples ** 2)
    assert abs(10.0 * np.log10(band_power / time_power)) < 0.1


def test_tf_validation():
    short = gen_pink_noise(0.05, SR, seed=2)
    with pytest.raises(ValidationError):
        transfer_function(short, short, fft_size=8192)
    a = gen_pink_noise(0.5, SR, seed=2)
    b = gen_pink_noise(0.5, 44100, seed=2)
    with pytest.raises(ValidationError):
        transfer_function(a, b)
    with pytest.raises(ValidationError):
        transfer_function(a, a, fft_size=1000)  # not a power of two


# --- estimate_itd -----------------------------------------------------------

def test_itd_identical_channels_is_exactly_zero(pink_5s):
    stereo = StereoBuffer(pink_5s, pink_5s)
    assert estimate_itd(stereo) == 0.0


def test_itd_recovers_constructed_delay(pink_5s):
    right = delayed_copy(pink_5s, 0.69e-3)
    est = estimate_itd(StereoBuffer(pink_5s, right))
    assert est == pytest.approx(0.69e-3, abs=ONE_SAMPLE)


def test_itd_swap_is_exact_negation(pink_5s):
    stereo = StereoBuffer(pink_5s, delayed_copy(pink_5s, 0.69e-3))
    assert estimate_itd(stereo.swapped()) == -estimate_itd(stereo)


def test_itd_phat_weighting(pink_5s):
    right = delayed_copy(pink_5s, 0.69e-3)
    est = estimate_itd(StereoBuffer(pink_5s, right), weighting="phat")
    assert est == pytest.approx(0.69e-3, abs=ONE_SAMPLE)


def test_itd_invariant_to_power_of_two_gain(pink_2s):
    stereo = StereoBuffer(pink_2s, delayed_copy(pink_2s, 0.43e-3))
    base = estimate_itd(stereo)
    for k in (0.25, 2.0, 8.0):
        scaled = StereoBuffer(SampleBuffer(k * stereo.left.samples, SR),
                              SampleBuffer(k * stereo.right.samples, SR))
        assert estimate_itd(scaled) == base  # exact: power-of-two scaling


@given(st.floats(0.1, 9.0))
@settings(max_examples=15, deadline=None)
def test_itd_invariant_to_common_gain(k):
    pink = gen_pink_noise(0.25, SR, seed=5)
    stereo = StereoBuffer(pink, delayed_copy(pink, 0.43e-3))
    scaled = StereoBuffer(SampleBuffer(k * stereo.left.samples, SR),
                          SampleBuffer(k * stereo.right.samples, SR))
    assert estimate_itd(scaled) == pytest.approx(estimate_itd(stereo), abs=1e-10)


def test_itd_rejects_silence():
    quiet = SampleBuffer(np.zeros(SR), SR)
    with pytest.raises(SilentSignalError):
        estimate_itd(StereoBuffer(quiet, quiet))


def test_itd_rejects_oversized_lag_window():
    pink = gen_pink_noise(0.01, SR, seed=1)
    with pytest.raises(ValidationError):
        estimate_itd(StereoBuffer(pink, pink), max_lag=0.02)


def test_itd_rejects_unknown_weighting(pink_2s):
    with pytest.raises(ValidationError):
        estimate_itd(StereoBuffer(pink_2s, pink_2s), weighting="scot")


def test_cross_correlation_matches_brute_force():
    # 40 seeded integer-delay cases against an independent full correlation
    max_lag = 96
    for case in range(40):
        rng_delay = np.random.default_rng(1000 + case)
        d = int(rng_delay.integers(0, max_lag + 1))
        pink = gen_pink_noise(2048 / SR, SR, seed=2000 + case)
        left = pink.samples
        right = np.zeros_like(left)
        right[d:] = left[: left.size - d]
        stereo = StereoBuffer(SampleBuffer(left, SR), SampleBuffer(right, SR))
        lags, cc = cross_correlation(stereo, max_lag=max_lag / SR)

        full = np.correlate(right, left, mode="full")
        center = left.size - 1
        window = full[center - max_lag : center + max_lag + 1]
        assert int(np.argmax(cc)) == int(np.argmax(window))
        assert lags[np.argmax(cc)] == d
        assert round(estimate_itd(stereo, max_lag=max_lag / SR) * SR) == d


# --- band_itd ---------------------------------------------------------------

def two_tone_capture(delay_low_s, delay_high_s, low_hz=220.0, high_hz=6000.0):
    """Sequential tone bursts; each band carries its own interaural delay."""
    total = int(2.6 * SR)

    def burst(freq, at_s):
        sig = np.zeros(total)
        tone = gen_sine(freq, 1.0, SR, 0.9).samples
        start = int(at_s * SR)
        sig[start : start + tone.size] = tone
        return SampleBuffer(sig, SR)

    low, high = burst(low_hz, 0.1), burst(high_hz, 1.4)
    left = SampleBuffer(low.samples + high.samples, SR)
    right = SampleBuffer(
        apply_fractional_delay(low, delay_low_s).samples
        + apply_fractional_delay(high, delay_high_s).samples,
        SR,
    )
    return StereoBuffer(left, right)


def test_band_itd_equal_delays():
    stereo = two_tone_capture(0.69e-3, 0.69e-3)
    low, high = band_itd(stereo)
    assert low == pytest.approx(0.69e-3, abs=ONE_SAMPLE)
    assert high == pytest.approx(0.69e-3, abs=ONE_SAMPLE)


def test_band_itd_recovers_42us_split():
    stereo = two_tone_capture(0.711e-3, 0.669e-3)
    low, high = band_itd(stereo)
    assert low - high == pytest.approx(42e-6, abs=25e-6)


def test_band_itd_missing_band_errors():
    # smooth-envelope low tone only: nothing usable in the 6 kHz octave
    n = int(2.0 * SR)
    envelope = np.hanning(n)
    tone = 0.9 * envelope * np.sin(2 * np.pi * 220.0 * np.arange(n) / SR)
    mono = SampleBuffer(tone, SR)
    stereo = StereoBuffer(mono, apply_fractional_delay(mono, 0.5e-3))
    with pytest.raises(AnalysisError):
        band_itd(stereo)


def test_band_itd_rejects_band_above_nyquist(pink_2s):
    stereo = StereoBuffer(pink_2s, pink_2s)
    with pytest.raises(ValidationError):
        band_itd(stereo, low_hz=220.0, high_hz=20000.0)


# --- calibration_check ------------------------------------------------------

def test_calibration_identical_passes(pink_5s):
    verdict = calibration_check(pink_5s, pink_5s)
    assert verdict.passed
    assert verdict.max_abs_deviation_db == pytest.approx(0.0, abs=1e-9)
    assert verdict.delay_s == 0.0


def test_calibration_shelf_fails(pink_5s):
    shelved = apply_spectral_gain(pink_5s, lambda f: 4.0 / (1.0 + (4000.0 / f) ** 8))
    verdict = calibration_check(pink_5s, shelved)
    assert not verdict.passed
    assert verdict.max_abs_deviation_db > 3.0
    assert verdict.worst_freq_hz > 4000.0


def test_calibration_narrow_sub3db_bump_passes(pink_5s):
    def bump(f):
        return 2.9 * np.exp(-0.5 * (np.log2(f / 8000.0) / 0.15) ** 2)

    boosted = apply_spectral_gain(pink_5s, bump)
    verdict = calibration_check(pink_5s, boosted)
    assert verdict.passed
    assert verdict.max_abs_deviation_db == pytest.approx(2.9, abs=0.3)


def test_calibration_time_skew_fails(pink_5s):
    shifted = np.zeros_like(pink_5s.samples)
    shifted[1:] = pink_5s.samples[:-1]
    verdict = calibration_check(pink_5s, SampleBuffer(shifted, SR))
    assert not verdict.passed
    assert abs(verdict.delay_s) > 0.5 / SR
    assert verdict.max_abs_deviation_db < 0.5  # level match alone was fine


# --- ild_spectrum_summary ---------------------------------------------------

def flat_tf(level_db, n_bins=512, f_max=16000.0):
    freqs = np.linspace(20.0, f_max, n_bins)
    return TransferFunction(freqs, np.full(n_bins, level_db), np.zeros(n_bins),
                            np.ones(n_bins), 0.0)


def test_summary_flat_zero():
    summary = ild_spectrum_summary(flat_tf(0.0))
    assert all(level == pytest.approx(0.0, abs=1e-12) for level in summary.values())


def test_summary_flat_minus_6db():
    level = 20.0 * math.log10(0.5)
    summary = ild_spectrum_summary(flat_tf(level))
    assert all(v == pytest.approx(level, rel=1e-12) for v in summary.values())


def test_summary_of_synthetic_head_shadow():
    freqs = np.linspace(20.0, 16000.0, 4096)
    mags = -head_shadow_ild(ShadowParams(), math.pi / 2, freqs)
    tf = TransferFunction(freqs, mags, np.zeros_like(freqs), np.ones_like(freqs), 0.0)
    summary = ild_spectrum_summary(tf)
    assert summary[2000.0] == pytest.approx(-6.0, abs=1.0)
    assert summary[8000.0] == pytest.approx(-15.0, abs=3.0)


def test_summary_band_outside_range_errors():
    tf = flat_tf(0.0, f_max=10000.0)
    with pytest.raises(ValidationError):
        ild_spectrum_summary(tf, bands=(16000.0,))


# --- analyze_capture --------------------------------------------------------

def test_analyze_capture_identical_channels(pink_5s):
    report = analyze_capture(StereoBuffer(pink_5s, pink_5s))
    assert report.itd_s == 0.0
    assert report.itd_low_s == pytest.approx(0.0, abs=1e-7)
    assert report.itd_high_s == pytest.approx(0.0, abs=1e-7)
    assert np.max(np.abs(report.ild_spectrum.magnitude_db)) < 1e-6
    assert np.array_equal(report.ipd_spectrum_deg, report.ild_spectrum.phase_deg)


def test_analyze_capture_constructed_delay(pink_5s):
    stereo = StereoBuffer(pink_5s, delayed_copy(pink_5s, 0.69e-3))
    report = analyze_capture(stereo)
    assert report.itd_s == pytest.approx(0.69e-3, abs=ONE_SAMPLE)
    assert report.itd_low_s == pytest.approx(0.69e-3, abs=2 * ONE_SAMPLE)
    assert report.itd_high_s == pytest.approx(0.69e-3, abs=ONE_SAMPLE)
