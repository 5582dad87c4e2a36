"""Periodic intensity waveforms, harmonic algebra, inhomogeneous-Poisson
event sampling, and nearest-event delay statistics."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from bellsim.errors import InvalidInputError
from bellsim.waveform import (
    THREE_WAVE_COEFFS,
    EventStream,
    Waveform,
    delay_statistics,
    harmonic_expansion,
    intensity_at,
    intensity_stats,
    nearest_delays,
    parse_streams,
    sample_events,
    sample_homogeneous_events,
    serialize_streams,
    three_wave,
    windowed_coincidences,
)


def make_rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


class TestWaveformConstruction:
    def test_three_wave_coefficients(self):
        w = three_wave()
        assert w.components == ((1.0, 1), (-2.0, 2), (1.0, 3))
        assert THREE_WAVE_COEFFS == (1.0, -2.0, 1.0)

    def test_period(self):
        assert three_wave().period == pytest.approx(2 * math.pi, abs=1e-15)
        assert three_wave(omega=2 * math.pi).period == pytest.approx(1.0, abs=1e-15)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            Waveform(components=(), omega=1.0)
        with pytest.raises(InvalidInputError):
            Waveform(components=((1.0, 0),), omega=1.0)  # harmonic must be >= 1
        with pytest.raises(InvalidInputError):
            Waveform(components=((math.nan, 1),), omega=1.0)
        with pytest.raises(InvalidInputError):
            Waveform(components=((1.0, 1),), omega=0.0)
        with pytest.raises(InvalidInputError):
            Waveform(components=((1.0, 1),), omega=1.0, amplitude=-1.0)


class TestIntensityAt:
    def test_three_wave_examples(self):
        w = three_wave()
        # Envelope cos(t) - 2cos(2t) + cos(3t): at t=0 it is 0; at t=pi it
        # is -1 - 2 - 1 = -4 -> intensity 16.
        assert intensity_at(w, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert intensity_at(w, math.pi) == pytest.approx(16.0, abs=1e-12)

    def test_intensity_is_squared_envelope(self):
        w = three_wave(omega=1.3, amplitude=2.0)
        t = np.linspace(0.0, w.period, 97)
        env = 1.0 * np.cos(1.3 * t) - 2.0 * np.cos(2.6 * t) + 1.0 * np.cos(3.9 * t)
        assert np.allclose(intensity_at(w, t), 4.0 * env**2, atol=1e-12)

    def test_amplitude_scales_quadratically(self):
        w1 = three_wave(amplitude=1.0)
        w3 = three_wave(amplitude=3.0)
        t = np.linspace(0.0, 6.0, 50)
        assert np.allclose(intensity_at(w3, t), 9.0 * np.asarray(intensity_at(w1, t)),
                           atol=1e-12)

    def test_periodicity(self):
        w = three_wave(omega=0.7)
        t = np.linspace(0.0, w.period, 33)
        assert np.allclose(intensity_at(w, t + w.period), intensity_at(w, t), atol=1e-12)


class TestIntensityStats:
    def test_three_wave_landmarks(self):
        s = intensity_stats(three_wave())
        assert s.mean == pytest.approx(3.0, rel=1e-9)
        assert s.maximum == pytest.approx(16.0, rel=1e-9)
        assert s.peak_to_mean == pytest.approx(16.0 / 3.0, rel=1e-6)
        assert s.peak_to_mean_squared == pytest.approx((16.0 / 3.0) ** 2, rel=1e-6)

    def test_three_wave_peak_location(self):
        s = intensity_stats(three_wave())
        assert len(s.argmax_times) == 1
        assert s.argmax_times[0] == pytest.approx(math.pi, abs=1e-9)

    def test_peak_repeats_every_odd_multiple_of_pi(self):
        w = three_wave()
        for n in range(3):
            t = (2 * n + 1) * math.pi
            assert intensity_at(w, t) == pytest.approx(16.0, rel=1e-12)

    def test_amplitude_scaling(self):
        s = intensity_stats(three_wave(amplitude=2.0))
        assert s.mean == pytest.approx(12.0, rel=1e-9)
        assert s.maximum == pytest.approx(64.0, rel=1e-9)

    def test_quoted_average_note_attached_to_three_wave_only(self):
        assert intensity_stats(three_wave()).note is not None
        assert "0.96" in intensity_stats(three_wave()).note
        single = Waveform(components=((1.0, 1),), omega=1.0)
        assert intensity_stats(single).note is None

    def test_single_component(self):
        # |A cos(2t)|^2 with |A| = 3: mean 9/2, max 9, peaks at 0 and pi/2.
        s = intensity_stats(Waveform(components=((1.0, 1),), omega=2.0, amplitude=3.0))
        assert s.mean == pytest.approx(4.5, rel=1e-9)
        assert s.maximum == pytest.approx(9.0, rel=1e-9)
        assert len(s.argmax_times) == 2

    def test_mean_matches_quadrature(self):
        w = Waveform(components=((0.7, 1), (1.1, 3), (-0.4, 4)), omega=1.9)
        s = intensity_stats(w)
        val, _ = integrate.quad(lambda t: intensity_at(w, t), 0.0, w.period, limit=200)
        assert s.mean == pytest.approx(val / w.period, rel=1e-9)

    def test_detection_time_filter_reduces_peak(self):
        sharp = intensity_stats(three_wave(omega=2 * math.pi))
        blurred = intensity_stats(three_wave(omega=2 * math.pi), detection_time=0.25)
        assert blurred.maximum < sharp.maximum
        # The period average is immune to a time-average filter.
        assert blurred.mean == pytest.approx(sharp.mean, rel=1e-9)

    def test_rejects_coarse_sampling(self):
        with pytest.raises(InvalidInputError):
            intensity_stats(three_wave(), samples_per_period=100)


class TestHarmonicExpansion:
    def test_three_wave_terms(self):
        e = harmonic_expansion(three_wave())
        assert e.a0 == pytest.approx(3.0, abs=1e-15)
        assert dict(e.terms) == pytest.approx(
            {1: -4.0, 2: 1.5, 3: -2.0, 4: 3.0, 5: -2.0, 6: 0.5}, abs=1e-12
        )

    def test_value_matches_direct_intensity(self):
        w = Waveform(components=((0.9, 1), (-1.3, 2)), omega=1.4, amplitude=1.2)
        e = harmonic_expansion(w)
        t = np.linspace(-2.0, 7.0, 201)
        assert np.allclose(e.value_at(t), intensity_at(w, t), atol=1e-10)

    def test_integral_matches_quadrature(self):
        w = three_wave(omega=0.9)
        e = harmonic_expansion(w)
        val, err = integrate.quad(lambda t: intensity_at(w, t), 0.3, 4.1, limit=200)
        assert e.integral(0.3, 4.1) == pytest.approx(val, abs=max(1e-10, 10 * err))

    def test_full_period_integral_is_dc_term(self):
        w = three_wave()
        e = harmonic_expansion(w)
        assert e.integral(0.0, w.period) == pytest.approx(e.a0 * w.period, abs=1e-12)

    def test_box_filter_limits(self):
        e = harmonic_expansion(three_wave())
        # Short window: unchanged; full period: only the DC term remains.
        tiny = e.box_filtered(1e-9)
        assert dict(tiny.terms) == pytest.approx(dict(e.terms), rel=1e-9)
        full = e.box_filtered(2 * math.pi)
        assert all(abs(a) < 1e-12 for _, a in full.terms)
        assert full.a0 == e.a0

    def test_box_filter_matches_moving_average(self):
        w = three_wave()
        e = harmonic_expansion(w)
        T = 0.8
        filt = e.box_filtered(T)
        for t in (0.0, 1.1, math.pi, 4.9):
            val, _ = integrate.quad(lambda u: intensity_at(w, u), t - T / 2, t + T / 2)
            assert filt.value_at(t) == pytest.approx(val / T, abs=1e-9)


class TestEventStream:
    def test_validation(self):
        with pytest.raises(InvalidInputError):
            EventStream(times=np.array([[1.0, 2.0]]), rate_scale=1.0)
        with pytest.raises(InvalidInputError):
            EventStream(times=np.array([2.0, 1.0]), rate_scale=1.0)
        with pytest.raises(InvalidInputError):
            EventStream(times=np.array([1.0, math.nan]), rate_scale=1.0)

    def test_times_read_only(self):
        s = EventStream(times=np.array([1.0, 2.0]), rate_scale=1.0)
        with pytest.raises(ValueError):
            s.times[0] = 0.0

    def test_n(self):
        assert EventStream(times=np.array([1.0, 2.0, 5.0]), rate_scale=1.0).n == 3


class TestSampleEvents:
    def test_deterministic(self):
        w = three_wave(omega=2 * math.pi)
        a = sample_events(w, span=50.0, rate_scale=1.0, rng=make_rng(4))
        b = sample_events(w, span=50.0, rate_scale=1.0, rng=make_rng(4))
        assert np.array_equal(a.times, b.times)

    def test_times_inside_span_and_sorted(self):
        s = sample_events(three_wave(), span=100.0, rate_scale=0.5, rng=make_rng(1))
        assert np.all((s.times >= 0.0) & (s.times <= 100.0))
        assert np.all(np.diff(s.times) > 0)

    def test_event_count_matches_mean_rate(self):
        # Mean intensity 3, rate_scale 2 -> expected 6 events per unit time.
        span = 2000.0
        s = sample_events(three_wave(), span=span, rate_scale=2.0, rng=make_rng(7))
        expected = 6.0 * span
        assert abs(s.n - expected) <= 5.0 * math.sqrt(expected)

    def test_zero_amplitude_gives_empty_stream(self):
        w = three_wave(amplitude=0.0)
        s = sample_events(w, span=100.0, rate_scale=1.0, rng=make_rng(0))
        assert s.n == 0

    def test_rejects_bad_inputs(self):
        w = three_wave()
        with pytest.raises(InvalidInputError):
            sample_events(w, span=-1.0, rate_scale=1.0, rng=make_rng(0))
        with pytest.raises(InvalidInputError):
            sample_events(w, span=10.0, rate_scale=-0.5, rng=make_rng(0))

    def test_histogram_matches_intensity_profile(self):
        """Event phases within the period follow the normalized intensity;
        chi-square on equal-mass bins (frozen seed)."""
        w = three_wave(omega=2 * math.pi)
        span, rate_scale = 2000.0, 10.0 / 3.0  # ~10 events per period
        s = sample_events(w, span=span, rate_scale=rate_scale, rng=make_rng(2024))
        phases = np.mod(s.times, w.period)

        e = harmonic_expansion(w)
        total = e.a0 * w.period

        def cdf(t):
            return e.integral(0.0, t) / total

        # Equal-mass bin edges by inverting the CDF.
        n_bins = 16
        edges = [0.0]
        for q in np.arange(1, n_bins) / n_bins:
            lo, hi = edges[-1], w.period
            for _ in range(80):  # bisect; cdf is monotone
                mid = 0.5 * (lo + hi)
                if cdf(mid) < q:
                    lo = mid
                else:
                    hi = mid
            edges.append(0.5 * (lo + hi))
        edges.append(w.period)

        counts, _ = np.histogram(phases, bins=np.asarray(edges))
        expected = np.full(n_bins, s.n / n_bins)
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        p = stats.chi2.sf(chi2, df=n_bins - 1)
        assert p > 0.01, (chi2, p, counts)

    def test_detection_time_smooths_profile(self):
        """A detection window close to the period flattens the sampled
        profile: the variance of per-bin phase counts drops."""
        w = three_wave(omega=2 * math.pi)
        sharp = sample_events(w, span=3000.0, rate_scale=2.0, rng=make_rng(31))
        blurred = sample_events(w, span=3000.0, rate_scale=2.0, rng=make_rng(31),
                                detection_time=0.9)

        def bin_spread(stream):
            counts, _ = np.histogram(np.mod(stream.times, w.period), bins=20,
                                     range=(0.0, w.period))
            return float(np.std(counts / counts.sum()))

        assert bin_spread(blurred) < 0.5 * bin_spread(sharp)


class TestHomogeneousEvents:
    def test_rate_and_span(self):
        s = sample_homogeneous_events(rate=3.0, span=5000.0, rng=make_rng(8))
        assert np.all((s.times >= 0.0) & (s.times <= 5000.0))
        assert abs(s.n - 15_000) <= 5 * math.sqrt(15_000)

    def test_flat_phase_histogram(self):
        s = sample_homogeneous_events(rate=5.0, span=4000.0, rng=make_rng(9))
        counts, _ = np.histogram(np.mod(s.times, 1.0), bins=10, range=(0.0, 1.0))
        expected = s.n / 10
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert stats.chi2.sf(chi2, df=9) > 0.01


class TestNearestDelays:
    def test_hand_case(self):
        a = EventStream(times=np.array([0.0, 10.0]), rate_scale=1.0)
        b = EventStream(times=np.array([1.0, 6.0, 9.5]), rate_scale=1.0)
        d = nearest_delays(a, b)
        # Nearest partner of 0.0 is 1.0 (delay +1.0); of 10.0 is 9.5 (-0.5).
        assert np.allclose(d, [1.0, -0.5], atol=1e-15)

    def test_empty_inputs(self):
        empty = EventStream(times=np.array([]), rate_scale=1.0)
        full = EventStream(times=np.array([1.0]), rate_scale=1.0)
        assert nearest_delays(empty, full).size == 0
        assert nearest_delays(full, empty).size == 0

    def test_median_statistics_empty(self):
        empty = EventStream(times=np.array([]), rate_scale=1.0)
        stats_ = delay_statistics(empty, empty)
        assert stats_.median_abs_delay is None
        assert stats_.counts.sum() == 0

    def test_independent_streams_median_law(self):
        """Independent unit-rate streams (period T = 1): the nearest-event
        |delay| is exponential with rate 2, so the median is ln(2)/2 =
        0.3466 periods."""
        rng = make_rng(123)
        a = sample_homogeneous_events(rate=1.0, span=20_000.0, rng=rng)
        b = sample_homogeneous_events(rate=1.0, span=20_000.0, rng=rng)
        stats_ = delay_statistics(a, b)
        assert abs(stats_.median_abs_delay - math.log(2) / 2) < 0.015

    def test_shared_waveform_halves_the_median(self):
        """Streams thinned from the same waveform bunch together: their
        nearest-delay median is well under half the independent-pair value."""
        w = three_wave(omega=2 * math.pi)
        rng = make_rng(77)
        shared_a = sample_events(w, span=2000.0, rate_scale=10.0 / 3.0, rng=rng)
        shared_b = sample_events(w, span=2000.0, rate_scale=10.0 / 3.0, rng=rng)
        indep_a = sample_homogeneous_events(rate=10.0, span=2000.0, rng=rng)
        indep_b = sample_homogeneous_events(rate=10.0, span=2000.0, rng=rng)
        med_shared = delay_statistics(shared_a, shared_b).median_abs_delay
        med_indep = delay_statistics(indep_a, indep_b).median_abs_delay
        assert med_shared / med_indep < 0.5

    def test_histogram_peaked_at_zero_for_shared_source(self):
        w = three_wave(omega=2 * math.pi)
        rng = make_rng(15)
        a = sample_events(w, span=1000.0, rate_scale=10.0 / 3.0, rng=rng)
        b = sample_events(w, span=1000.0, rate_scale=10.0 / 3.0, rng=rng)
        stats_ = delay_statistics(a, b, bins=32, histogram_range=(-0.5, 0.5))
        counts = stats_.counts
        center = counts[len(counts) // 2 - 1 : len(counts) // 2 + 1].sum()
        edge = counts[:2].sum() + counts[-2:].sum()
        assert center > 3 * max(edge, 1)


class TestWindowedCoincidences:
    def test_hand_case(self):
        a = EventStream(times=np.array([0.0, 5.0, 10.0]), rate_scale=1.0)
        b = EventStream(times=np.array([0.3, 5.6, 9.0]), rate_scale=1.0)
        # window 1.0 -> half-width 0.5: only 0.0~0.3 pairs up.
        assert windowed_coincidences(a, b, window=1.0) == 1
        # window 1.2 -> half-width 0.6: 5.0~5.6 joins.
        assert windowed_coincidences(a, b, window=1.2) == 2
        assert windowed_coincidences(a, b, window=10.0) == 3

    def test_monotone_in_window(self):
        rng = make_rng(21)
        a = sample_homogeneous_events(rate=1.0, span=500.0, rng=rng)
        b = sample_homogeneous_events(rate=1.0, span=500.0, rng=rng)
        widths = [0.01, 0.1, 0.5, 2.0, 10.0]
        counts = [windowed_coincidences(a, b, window=w) for w in widths]
        assert counts == sorted(counts)

    def test_saturates_at_full_span(self):
        rng = make_rng(22)
        a = sample_homogeneous_events(rate=1.0, span=100.0, rng=rng)
        b = sample_homogeneous_events(rate=1.0, span=100.0, rng=rng)
        assert windowed_coincidences(a, b, window=500.0) == a.n

    def test_zero_window(self):
        a = EventStream(times=np.array([1.0]), rate_scale=1.0)
        b = EventStream(times=np.array([2.0]), rate_scale=1.0)
        assert windowed_coincidences(a, b, window=0.1) == 0

    def test_shared_source_beats_independent_across_seeds(self):
        """Sign test: at a tight window the shared-waveform pair yields more
        coincidences than the matched-rate independent pair, for every seed."""
        w = three_wave(omega=2 * math.pi)
        wins = 0
        trials = 20
        for seed in range(trials):
            rng = make_rng(1000 + seed)
            sa = sample_events(w, span=2000.0, rate_scale=1.0 / 3.0, rng=rng)
            sb = sample_events(w, span=2000.0, rate_scale=1.0 / 3.0, rng=rng)
            ia = sample_homogeneous_events(rate=1.0, span=2000.0, rng=rng)
            ib = sample_homogeneous_events(rate=1.0, span=2000.0, rng=rng)
            shared = windowed_coincidences(sa, sb, window=0.05)
            indep = windowed_coincidences(ia, ib, window=0.05)
            if shared > indep:
                wins += 1
        assert wins >= 18, f"shared beat independent only {wins}/{trials} times"


class TestSerialization:
    def test_round_trip(self):
        w = three_wave()
        rng = make_rng(33)
        streams = {
            "alice": sample_events(w, span=50.0, rate_scale=1.0, rng=rng),
            "bob": sample_events(w, span=50.0, rate_scale=1.0, rng=rng),
        }
        text = serialize_streams(streams)
        parsed = parse_streams(text)
        assert set(parsed) == {"alice", "bob"}
        assert np.allclose(parsed["alice"].times, streams["alice"].times, atol=0)
        assert np.allclose(parsed["bob"].times, streams["bob"].times, atol=0)

    def test_format_is_time_sorted_tsv(self):
        a = EventStream(times=np.array([1.0, 3.0]), rate_scale=1.0)
        b = EventStream(times=np.array([2.0]), rate_scale=1.0)
        lines = serialize_streams({"a": a, "b": b}).splitlines()
        assert lines == ["1\ta", "2\tb", "3\ta"]

    def test_parse_rejects_garbage(self):
        with pytest.raises(InvalidInputError):
            parse_streams("not-a-number\tx\n")
