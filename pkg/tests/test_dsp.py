"""Front-end transforms: averaging, segmentation, clutter removal, FFT,
and the 200 Hz -> 30 Hz resampler."""

import numpy as np
import pytest

import radar_vitals as rv


def make_cube(values, rate=30.0):
    return rv.RangeProfileCube(values=values, slow_time_rate=rate,
                               truth_hr=np.full(values.shape[-1], 70.0))


class TestAverageChirps:
    def test_identical_chirps_unchanged(self):
        chirp = np.random.default_rng(0).standard_normal(256)
        burst = np.tile(chirp[:, None], (1, 20))
        assert np.allclose(rv.average_chirps(burst), chirp, atol=1e-15)

    def test_opposite_chirps_cancel(self):
        v = np.random.default_rng(1).standard_normal(256)
        burst = np.stack([v, -v], axis=1)
        assert np.allclose(rv.average_chirps(burst), 0.0, atol=1e-16)

    def test_noise_variance_reduced_by_chirp_count(self):
        rng = np.random.default_rng(2)
        burst = rng.standard_normal((256, 20))
        out = rv.average_chirps(burst)
        assert np.var(out) == pytest.approx(1 / 20, rel=0.2)

    def test_empty_burst_rejected(self):
        with pytest.raises(ValueError):
            rv.average_chirps(np.zeros((256, 0)))


class TestSegmentStream:
    def test_120s_gives_5_segments(self):
        cube = make_cube(np.zeros((4, 2, 3600)))
        segs = rv.segment_stream(cube)
        assert len(segs) == 5
        assert [s.cube.start_time for s in segs] == [0.0, 15.0, 30.0, 45.0, 60.0]
        assert all(s.cube.num_samples == 1800 for s in segs)

    def test_60s_gives_1_segment(self):
        assert len(rv.segment_stream(make_cube(np.zeros((4, 2, 1800))))) == 1

    def test_59s_gives_0_segments(self):
        assert rv.segment_stream(make_cube(np.zeros((4, 2, 1770)))) == []

    def test_count_formula(self):
        for total in (1800, 2249, 2250, 5000, 9001):
            cube = make_cube(np.zeros((2, 1, total)))
            expected = (total - 1800) // 450 + 1
            assert len(rv.segment_stream(cube)) == expected

    def test_segments_cover_every_sample_up_to_last_window_end(self):
        total = 3600
        segs = rv.segment_stream(make_cube(np.zeros((2, 1, total))))
        covered = np.zeros(total, dtype=bool)
        for s in segs:
            start = int(round(s.cube.start_time * 30))
            covered[start:start + 1800] = True
        last_end = int(round(segs[-1].cube.start_time * 30)) + 1800
        assert covered[:last_end].all()

    def test_labels_average_truth(self):
        values = np.zeros((2, 1, 1800))
        cube = rv.RangeProfileCube(values=values, slow_time_rate=30.0,
                                   truth_hr=np.linspace(60, 80, 1800))
        seg = rv.segment_stream(cube)[0]
        assert seg.label_hr == pytest.approx(70.0)


class TestClutterFilter:
    def test_constant_input_zeroed(self):
        x = np.full((3, 2, 100), 7.5)
        assert np.all(rv.clutter_filter(x) == 0.0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((3, 2, 200))
        assert np.allclose(rv.clutter_filter(x + 11.0), rv.clutter_filter(x), atol=1e-12)

    def test_output_time_mean_is_zero(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((5, 3, 321)) + 2.0
        out = rv.clutter_filter(x)
        assert np.max(np.abs(out.mean(axis=-1))) < 1e-13

    def test_idempotent_to_machine_precision(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((4, 2, 1800)) * 3.0
        once = rv.clutter_filter(x)
        twice = rv.clutter_filter(once)
        assert np.max(np.abs(twice - once)) <= 1e-13 * np.max(np.abs(x))

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            rv.clutter_filter(np.zeros((3, 2, 1)))


class TestRangeFft:
    def test_tone_at_bin_37_argmax(self):
        n = np.arange(256)
        tone = np.cos(2 * np.pi * 37 * n / 256)
        chirps = np.tile(tone[:, None, None], (1, 1, 3))
        out = rv.range_fft(chirps)
        assert out.shape == (129, 1, 3)
        assert np.abs(out[:, 0, 0]).argmax() == 37
        # oracle: numpy's own rfft
        assert np.allclose(out[:, 0, 0], np.fft.rfft(tone), atol=1e-10)

    def test_zero_in_zero_out(self):
        assert np.all(rv.range_fft(np.zeros((256, 2, 5))) == 0)

    def test_256_samples_give_129_bins(self):
        assert rv.range_fft(np.zeros((256, 3, 2))).shape[0] == 129
        assert rv.range_fft(np.zeros((64, 1, 2))).shape[0] == 33

    def test_parseval_one_sided(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((256, 2, 4))
        X = rv.range_fft(x)
        time_energy = np.sum(x ** 2, axis=0)
        mags = np.abs(X) ** 2
        freq_energy = (mags[0] + 2 * mags[1:-1].sum(axis=0) + mags[-1]) / 256
        assert np.allclose(freq_energy, time_energy, rtol=1e-9)

    def test_rejects_non_finite_and_odd_length(self):
        with pytest.raises(ValueError):
            rv.range_fft(np.full((256, 1, 1), np.nan))
        with pytest.raises(ValueError):
            rv.range_fft(np.zeros((255, 1, 1)))

    def test_hann_window_option(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((256, 1, 2))
        out = rv.range_fft(x, window="hann")
        oracle = np.fft.rfft(x * np.hanning(256)[:, None, None], axis=0)
        assert np.allclose(out, oracle, atol=1e-12)


class TestDownsampleUwb:
    def test_constant_preserved(self):
        x = np.full((3, 2, 2000), 4.2)
        out = rv.downsample_uwb(x)
        assert out.shape[-1] == 300
        assert np.allclose(out, 4.2, atol=1e-12)

    def test_24000_samples_give_3600(self):
        out = rv.downsample_uwb(np.zeros((2, 1, 24000)))
        assert out.shape == (2, 1, 3600)

    def test_low_frequency_amplitude_preserved(self):
        t = np.arange(24000) / 200.0
        x = np.sin(2 * np.pi * 0.25 * t)[None, None, :]
        out = rv.downsample_uwb(x)[0, 0]
        amp = np.sqrt(2 * np.mean(out ** 2))  # 30 full cycles: RMS*sqrt(2)
        assert amp == pytest.approx(1.0, rel=0.005)

    def test_matches_brute_force_fractional_windows(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(200)
        out = rv.downsample_uwb(x[None, None, :])[0, 0]
        ratio = 200.0 / 30.0
        for m in range(out.shape[-1]):
            lo, hi = m * ratio, (m + 1) * ratio
            i0, i1 = int(np.floor(lo)), int(np.floor(hi))
            total = 0.0
            for i in range(i0, min(i1 + 1, 200)):
                overlap = min(hi, i + 1) - max(lo, i)
                if overlap > 0:
                    total += overlap * x[i]
            assert out[m] == pytest.approx(total / ratio, abs=1e-12)

    def test_complex_input_supported(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal(400) + 1j * rng.standard_normal(400)
        out = rv.downsample_uwb(x[None, None, :])[0, 0]
        re = rv.downsample_uwb(x.real[None, None, :])[0, 0]
        im = rv.downsample_uwb(x.imag[None, None, :])[0, 0]
        assert np.allclose(out, re + 1j * im, atol=1e-12)


class TestLinearity:
    @pytest.mark.parametrize("op,shape", [
        (rv.average_chirps, (64, 8)),
        (rv.clutter_filter, (4, 2, 100)),
        (rv.range_fft, (64, 2, 5)),
        (rv.downsample_uwb, (2, 1, 400)),
    ])
    def test_additivity_and_homogeneity(self, op, shape):
        rng = np.random.default_rng(10)
        x = rng.standard_normal(shape)
        y = rng.standard_normal(shape)
        a = 2.7
        lhs = op(x + a * y)
        rhs = np.asarray(op(x)) + a * np.asarray(op(y))
        assert np.allclose(lhs, rhs, atol=1e-9)
