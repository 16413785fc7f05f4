"""Band-limited impulse construction in both domains."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpid import (
    BandLimits,
    InvalidBandError,
    band_limited_impulse,
    time_domain_impulse,
)

from oracles import cosine_comb


class TestBandLimits:
    def test_validates_ordering(self):
        with pytest.raises(InvalidBandError):
            BandLimits(200.0, 100.0)
        with pytest.raises(InvalidBandError):
            BandLimits(100.0, 100.0)
        with pytest.raises(InvalidBandError):
            BandLimits(-1.0, 100.0)

    def test_validate_for_rejects_band_past_nyquist(self):
        band = BandLimits(100.0, 30000.0)
        with pytest.raises(InvalidBandError) as excinfo:
            band.validate_for(48000.0)
        assert "24000" in str(excinfo.value)

    def test_mask_is_pure_comparison_with_inclusive_edges(self):
        # n=8 at fs=8 puts bin centers at 0..4 Hz; band [1, 3] hits 1, 2, 3.
        band = BandLimits(1.0, 3.0)
        np.testing.assert_array_equal(
            band.mask(8, 8.0), [False, True, True, True, False]
        )

    def test_bin_range(self):
        assert BandLimits(1.0, 3.0).bin_range(8, 8.0) == (1, 3)
        with pytest.raises(InvalidBandError):
            # Band sits strictly between the 1 Hz and 2 Hz bin centers.
            BandLimits(1.2, 1.8).bin_range(8, 8.0)


class TestFrequencyDomain:
    def test_frozen_small_case(self):
        # n=8, fs=8, band [1, 2]: bins 1 and 2 carry 2/8, mirrored at 6 and 7.
        spectrum = band_limited_impulse(8, 8.0, BandLimits(1.0, 2.0))
        expected = [0.0, 0.25, 0.25, 0.0, 0.0, 0.0, 0.25, 0.25]
        np.testing.assert_allclose(spectrum.bins, expected, rtol=0, atol=0)
        assert spectrum.hermitian

    def test_bins_are_two_valued(self):
        spectrum = band_limited_impulse(256, 48000.0, BandLimits(1000.0, 20000.0))
        values = set(np.round(spectrum.bins.real, 15))
        assert values == {0.0, 2.0 / 256}
        assert np.all(spectrum.bins.imag == 0.0)

    def test_dc_and_nyquist_edges_inclusive(self):
        spectrum = band_limited_impulse(8, 8.0, BandLimits(0.0, 4.0))
        np.testing.assert_allclose(spectrum.bins, np.full(8, 0.25), atol=0)

    def test_bin_count_scales_on_exact_grids(self):
        # Doubling n doubles the in-band bin count when edges sit on bins.
        band = BandLimits(1000.0, 2000.0)
        for n in (48, 96, 192):
            mask = band.mask(n, 48000.0)
            assert int(mask.sum()) == n // 48 + 1

    def test_band_past_nyquist_rejected(self):
        with pytest.raises(InvalidBandError):
            band_limited_impulse(64, 8000.0, BandLimits(100.0, 5000.0))


class TestTimeDomain:
    def test_matches_cosine_sum_oracle(self):
        x = time_domain_impulse(64, 8000.0, BandLimits(500.0, 3000.0))
        expected = cosine_comb(64, 8000.0, 500.0, 3000.0)
        np.testing.assert_allclose(x.samples, expected, rtol=0, atol=1e-12)

    def test_even_symmetry_and_peak_at_zero(self):
        x = time_domain_impulse(4096, 48000.0, BandLimits(100.0, 20000.0))
        samples = x.samples
        np.testing.assert_allclose(
            samples[1:], samples[1:][::-1], rtol=0, atol=1e-12
        )
        assert np.argmax(np.abs(samples)) == 0
        assert samples[0] > 0

    def test_imaginary_residue_is_negligible(self):
        spectrum = band_limited_impulse(4096, 48000.0, BandLimits(100.0, 20000.0))
        residue = np.max(np.abs(np.fft.ifft(spectrum.bins).imag))
        assert residue < 1e-12

    @given(
        st.integers(min_value=2, max_value=128).map(lambda h: 2 * h),
        st.floats(min_value=10.0, max_value=1000.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_time_signal_is_real_and_even_everywhere(self, n, f_lo):
        x = time_domain_impulse(n, 48000.0, BandLimits(f_lo, 24000.0))
        samples = x.samples
        np.testing.assert_allclose(
            samples[1:], samples[1:][::-1], rtol=0, atol=1e-12
        )
