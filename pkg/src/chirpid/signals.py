"""Time- and frequency-domain containers and the transform contract.

Conventions used throughout the package:

* spectra are full length-N complex arrays, not half-spectra;
* the forward transform is unnormalized, ``X[k] = sum_n x[n] exp(-2j pi k n / N)``;
* the inverse transform carries the ``1/N`` factor;
* signal length N is even and at least 2 (any even N, not only powers of two);
* everything is computed in 64-bit floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    as_complex_array,
    as_float_array,
    check_even_length,
    check_positive,
    check_same_grid,
    hermitian_defect,
    lock,
)
from .errors import NonHermitianError

# Conjugate symmetry is validated at two strengths: tightly when a spectrum is
# constructed with the hermitian flag, loosely when inverting back to time so
# accumulated round-off from spectral arithmetic still inverts cleanly.
HERMITIAN_CONSTRUCTION_RTOL = 1e-12
HERMITIAN_INVERSE_RTOL = 1e-9


@dataclass(frozen=True)
class RealSignal:
    """A real, uniformly sampled signal.

    Parameters
    ----------
    samples : array_like
        Finite real samples; even length, at least 2.
    sample_rate_hz : float
        Sampling rate in Hz, strictly positive.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        arr = as_float_array(self.samples, "samples")
        check_even_length(arr.shape[0], "samples")
        check_positive(self.sample_rate_hz, "sample_rate_hz")
        object.__setattr__(self, "samples", lock(arr))
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return self.n / self.sample_rate_hz


@dataclass(frozen=True)
class Spectrum:
    """A full-length complex spectrum.

    When ``hermitian`` is set, ``bins[N-k] == conj(bins[k])`` is enforced at
    construction (relative to the largest bin magnitude), so the spectrum is
    guaranteed to invert to a real signal.
    """

    bins: np.ndarray
    sample_rate_hz: float
    hermitian: bool = field(default=False)

    def __post_init__(self):
        arr = as_complex_array(self.bins, "bins")
        check_even_length(arr.shape[0], "bins")
        check_positive(self.sample_rate_hz, "sample_rate_hz")
        if self.hermitian:
            top = float(np.max(np.abs(arr)))
            # The absolute floor covers subnormal spectra, which cannot
            # carry relative precision at all.
            tol = HERMITIAN_CONSTRUCTION_RTOL * top + np.finfo(np.float64).tiny
            if hermitian_defect(arr) > tol:
                raise NonHermitianError(
                    "spectrum flagged hermitian breaks conjugate symmetry"
                )
        object.__setattr__(self, "bins", lock(arr))
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def n(self) -> int:
        return self.bins.shape[0]

    @property
    def bin_spacing_hz(self) -> float:
        return self.sample_rate_hz / self.n


def dft(x: RealSignal) -> Spectrum:
    """Forward transform of a real signal; the result is flagged hermitian."""
    return Spectrum(np.fft.fft(x.samples), x.sample_rate_hz, hermitian=True)


def idft(spectrum: Spectrum) -> RealSignal:
    """Inverse transform back to a real signal.

    Raises
    ------
    NonHermitianError
        If the spectrum deviates from conjugate symmetry by more than
        ``HERMITIAN_INVERSE_RTOL`` relative to its largest bin, in which case
        no real time signal exists and silently dropping the imaginary part
        would hide the defect.
    """
    top = float(np.max(np.abs(spectrum.bins)))
    tol = HERMITIAN_INVERSE_RTOL * top + np.finfo(np.float64).tiny
    if hermitian_defect(spectrum.bins) > tol:
        raise NonHermitianError(
            "spectrum is not conjugate-symmetric; no real time signal exists"
        )
    samples = np.fft.ifft(spectrum.bins).real
    return RealSignal(samples, spectrum.sample_rate_hz)


def multiply(a: Spectrum, b: Spectrum) -> Spectrum:
    """Bin-wise product of two spectra (circular convolution in time).

    The hermitian flag survives only if both factors carry it.
    """
    check_same_grid(a, b, "spectra")
    return Spectrum(
        a.bins * b.bins, a.sample_rate_hz, hermitian=a.hermitian and b.hermitian
    )


def energy(obj: RealSignal | Spectrum) -> float:
    """Signal energy; ``sum(x**2)`` in time, ``sum(|X|**2)/N`` in frequency.

    The two definitions agree (Parseval) for transform pairs.
    """
    if isinstance(obj, RealSignal):
        return float(np.sum(obj.samples * obj.samples))
    if isinstance(obj, Spectrum):
        return float(np.sum(np.abs(obj.bins) ** 2) / obj.n)
    raise TypeError(f"energy expects RealSignal or Spectrum, got {type(obj)!r}")
