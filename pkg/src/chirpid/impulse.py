"""Zero-phase band-limited impulses.

The frequency-domain impulse is two-valued: ``2/N`` on every bin whose center
frequency lies inside the band (edges inclusive), zero elsewhere, mirrored so
the spectrum is conjugate-symmetric.  Its time-domain counterpart is real,
even-symmetric, and circularly centered at sample 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_even_length, check_positive
from .errors import InvalidBandError
from .signals import RealSignal, Spectrum, idft


@dataclass(frozen=True)
class BandLimits:
    """A frequency band ``[f_min_hz, f_max_hz]`` in Hz.

    The upper bound against the Nyquist frequency depends on a sample rate,
    so it is checked at the point of use via :meth:`validate_for`.
    """

    f_min_hz: float
    f_max_hz: float

    def __post_init__(self):
        if not (0 <= self.f_min_hz < self.f_max_hz):
            raise InvalidBandError(
                f"need 0 <= f_min < f_max, got [{self.f_min_hz}, {self.f_max_hz}]"
            )
        object.__setattr__(self, "f_min_hz", float(self.f_min_hz))
        object.__setattr__(self, "f_max_hz", float(self.f_max_hz))

    def validate_for(self, sample_rate_hz: float) -> None:
        nyquist = sample_rate_hz / 2.0
        if self.f_max_hz > nyquist:
            raise InvalidBandError(
                f"f_max {self.f_max_hz} Hz exceeds half the sample rate "
                f"({nyquist} Hz)"
            )

    def mask(self, n: int, sample_rate_hz: float) -> np.ndarray:
        """Boolean in-band mask over bins ``0..N/2`` by pure comparison.

        Band edges snap to the bin grid by comparing each bin center
        frequency against the edges; there is no fractional-bin tapering.
        """
        freqs = np.arange(n // 2 + 1) * (sample_rate_hz / n)
        return (freqs >= self.f_min_hz) & (freqs <= self.f_max_hz)

    def bin_range(self, n: int, sample_rate_hz: float) -> tuple[int, int]:
        """First and last in-band bin index over ``0..N/2``.

        Raises
        ------
        InvalidBandError
            If no bin center falls inside the band.
        """
        idx = np.flatnonzero(self.mask(n, sample_rate_hz))
        if idx.size == 0:
            raise InvalidBandError(
                f"no bin centers inside [{self.f_min_hz}, {self.f_max_hz}] Hz "
                f"for n={n}, fs={sample_rate_hz}"
            )
        return int(idx[0]), int(idx[-1])


def band_limited_impulse(n: int, sample_rate_hz: float, band: BandLimits) -> Spectrum:
    """Frequency-domain band-limited impulse.

    Parameters
    ----------
    n : int
        Transform length, even, at least 2.
    sample_rate_hz : float
        Sampling rate in Hz.
    band : BandLimits
        Pass band; ``band.f_max_hz`` must not exceed ``sample_rate_hz / 2``.

    Returns
    -------
    Spectrum
        Purely real bins, ``2/n`` in band and 0 elsewhere, flagged hermitian.
    """
    check_even_length(n, "n")
    check_positive(sample_rate_hz, "sample_rate_hz")
    band.validate_for(sample_rate_hz)
    half = np.where(band.mask(n, sample_rate_hz), 2.0 / n, 0.0)
    bins = np.zeros(n, dtype=np.complex128)
    bins[: n // 2 + 1] = half
    bins[n // 2 + 1 :] = half[1 : n // 2][::-1]
    return Spectrum(bins, sample_rate_hz, hermitian=True)


def time_domain_impulse(n: int, sample_rate_hz: float, band: BandLimits) -> RealSignal:
    """Time-domain band-limited impulse: real, even-symmetric, peaked at n=0."""
    return idft(band_limited_impulse(n, sample_rate_hz, band))
