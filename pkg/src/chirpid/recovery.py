"""Impulse-model recovery by phase removal, and the unstable baseline.

Given a capture ``y`` of a system forced with a chirped band-limited
reference, removing the chirp phase recovers the band-limited impulse model
directly: the capture spectrum is multiplied by the inverse allpass, never
divided by the reference.  Out-of-band bins, where the reference carries no
power, simply stay near zero instead of blowing up.

``naive_deconvolve`` implements the textbook alternative, bin-wise division
by the reference spectrum, whose failure on empty bins motivates the allpass
route; it is kept for comparison tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive, check_same_grid
from .errors import (
    DivisionBlowupError,
    EmptyBandError,
    InvalidCountError,
    ZeroSignalError,
)
from .chirp import PhaseCurve, apply_allpass, invert_phase
from .impulse import BandLimits, band_limited_impulse
from .signals import RealSignal, Spectrum, dft, idft

DEFAULT_GUARD_BINS = 2


@dataclass(frozen=True)
class RecoveryResult:
    """A recovered band-limited impulse model in both domains.

    ``in_band_error`` is populated only when the true system was supplied to
    the recovery; it is the relative error metric of :func:`in_band_error`.
    """

    model: RealSignal
    model_spectrum: Spectrum
    band: BandLimits
    in_band_error: float | None = None


def recover_impulse_model(
    y: RealSignal,
    curve: PhaseCurve,
    band: BandLimits,
    scale: float = 1.0,
    reference_system: RealSignal | None = None,
    guard_bins: int = DEFAULT_GUARD_BINS,
) -> RecoveryResult:
    """Recover the band-limited impulse model from a capture.

    The capture spectrum is multiplied by the inverse of the curve used at
    generation and by the reference's normalization ``scale``; bin
    magnitudes scale by exactly ``scale`` and nothing is divided, so the
    output is finite for any finite input.

    Parameters
    ----------
    y : RealSignal
        Captured (possibly stacked) response.
    curve : PhaseCurve
        The exact phase curve the reference was generated with.
    band : BandLimits
        Band of the reference; recorded on the result and used for the
        error metric.
    scale : float, optional
        Normalization factor recorded by ``make_reference``; multiplying by
        it restores the units of an un-normalized reference.
    reference_system : RealSignal, optional
        True system taps.  When given, ``in_band_error`` on the result is
        the recovered spectrum's relative in-band error against the
        band-limited truth.
    guard_bins : int, optional
        Edge bins excluded by the error metric.
    """
    spectrum = apply_allpass(dft(y), invert_phase(curve))
    bins = spectrum.bins * float(scale)
    model_spectrum = Spectrum(bins, y.sample_rate_hz, hermitian=True)
    model = idft(model_spectrum)
    err = None
    if reference_system is not None:
        err = in_band_error(
            dft(reference_system), model_spectrum, band, guard_bins=guard_bins
        )
    return RecoveryResult(model, model_spectrum, band, err)


def naive_deconvolve(
    numerator: Spectrum, denominator: Spectrum, floor: float | None = None
) -> Spectrum:
    """Bin-wise spectral division, the unstable baseline.

    With ``floor=None`` (the default) the division is taken literally; if
    any denominator bin has zero magnitude the quotient is not finite there
    and a :class:`DivisionBlowupError` is raised enumerating every offending
    bin, with the IEEE quotient attached for reporting.  With a positive
    ``floor`` the denominator magnitudes are clamped at the floor before
    dividing, which keeps the output finite but fabricates out-of-band
    content.
    """
    check_same_grid(numerator, denominator, "spectra")
    mag = np.abs(denominator.bins)
    if floor is None:
        zero_bins = np.flatnonzero(mag == 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            quotient = numerator.bins / denominator.bins
        if zero_bins.size:
            raise DivisionBlowupError(zero_bins, quotient)
        return Spectrum(quotient, numerator.sample_rate_hz, hermitian=False)
    check_positive(floor, "floor")
    # Clamp magnitudes at the floor, keeping each bin's phase; zero bins
    # have no phase and become the floor itself.
    clamped = np.where(
        mag >= floor,
        denominator.bins,
        np.where(
            mag > 0.0,
            denominator.bins * (floor / np.where(mag > 0.0, mag, 1.0)),
            floor,
        ),
    )
    return Spectrum(
        numerator.bins / clamped, numerator.sample_rate_hz, hermitian=False
    )


def in_band_error(
    reference: Spectrum,
    model: Spectrum,
    band: BandLimits,
    guard_bins: int = DEFAULT_GUARD_BINS,
) -> float:
    """Relative spectral error of a model against the band-limited truth.

    The reference is masked by the band-limited impulse (so the comparison
    target is what a perfect recovery would produce), the maximum deviation
    is taken over the in-band bins with ``guard_bins`` dropped at each edge,
    and the result is normalized by the maximum in-band magnitude of the
    masked reference.

    Raises
    ------
    EmptyBandError
        If the guard consumes the whole band.
    ZeroSignalError
        If the reference carries no in-band energy to normalize by.
    """
    check_same_grid(reference, model, "spectra")
    if guard_bins < 0:
        raise InvalidCountError(f"guard_bins must be >= 0, got {guard_bins}")
    n, fs = reference.n, reference.sample_rate_hz
    band.validate_for(fs)
    k_lo, k_hi = band.bin_range(n, fs)
    lo, hi = k_lo + guard_bins, k_hi - guard_bins
    if lo > hi:
        raise EmptyBandError(
            f"guard_bins={guard_bins} leaves no bins of in-band range "
            f"[{k_lo}, {k_hi}]"
        )
    mask = band_limited_impulse(n, fs, band)
    target = reference.bins * mask.bins
    denom = float(np.max(np.abs(target[k_lo : k_hi + 1])))
    if denom == 0.0:
        raise ZeroSignalError("reference spectrum has no in-band energy")
    num = float(np.max(np.abs(model.bins[lo : hi + 1] - target[lo : hi + 1])))
    return num / denom
