"""Allpass chirping: phase curves, swept excitations, and their inversion.

A phase curve assigns one phase value per DFT bin.  Multiplying a spectrum by
``exp(1j * phase)`` changes no bin magnitude, so chirping an excitation and
undoing it later are both exactly stable: nothing is ever divided.

The linear family designs its phase directly on the bin grid: group delay
rises linearly from 0 at the lower band edge to the sweep duration at the
upper edge, which spreads the band-limited impulse into a chirp.  The two
exponential families are generated in the time domain from their frequency
laws; their curves invert the analytic phase law mapped onto the bin grid
(group delay at a bin equals the time the sweep passes that bin's frequency),
so recovery through them is an approximation rather than an exact per-bin
inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import (
    as_float_array,
    check_even_length,
    check_positive,
    check_same_grid,
    lock,
    phase_mod_pi_defect,
)
from .errors import (
    InvalidDurationError,
    InvalidRangeError,
    ZeroSignalError,
)
from .impulse import BandLimits, band_limited_impulse, time_domain_impulse
from .signals import RealSignal, Spectrum, idft

# Established at construction so every curve is safe to apply to a hermitian
# spectrum: zero phase at DC, a multiple of pi at Nyquist, odd symmetry.
PHASE_DC_ATOL = 1e-12
PHASE_NYQUIST_ATOL = 1e-9
PHASE_SYMMETRY_ATOL = 1e-9

FAMILIES = ("linear", "exp1", "exp2", "none")


@dataclass(frozen=True)
class PhaseCurve:
    """Per-bin phase values for an allpass multiplier ``exp(1j * phase)``.

    Invariants (checked at construction): ``phase[0] == 0``, ``phase[N/2]``
    is a multiple of pi, and ``phase[N-k] == -phase[k]`` — together they make
    the multiplier conjugate-symmetric, so applying the curve to the spectrum
    of a real signal yields the spectrum of a real signal.
    """

    phase: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        arr = as_float_array(self.phase, "phase")
        check_even_length(arr.shape[0], "phase")
        check_positive(self.sample_rate_hz, "sample_rate_hz")
        n = arr.shape[0]
        if abs(arr[0]) > PHASE_DC_ATOL:
            raise InvalidRangeError(f"phase[0] must be 0, got {arr[0]}")
        if phase_mod_pi_defect(arr[n // 2]) > PHASE_NYQUIST_ATOL:
            raise InvalidRangeError(
                f"phase at Nyquist must be a multiple of pi, got {arr[n // 2]}"
            )
        defect = np.max(np.abs(arr[1 : n // 2] + arr[n // 2 + 1 :][::-1]))
        if defect > PHASE_SYMMETRY_ATOL:
            raise InvalidRangeError(
                f"phase breaks odd symmetry by {float(defect)} rad"
            )
        object.__setattr__(self, "phase", lock(arr))
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def n(self) -> int:
        return self.phase.shape[0]


class SweepResult(NamedTuple):
    signal: RealSignal
    phase: PhaseCurve


class Reference(NamedTuple):
    """A normalized excitation with everything needed to undo it exactly."""

    signal: RealSignal
    phase: PhaseCurve
    scale: float


@dataclass(frozen=True)
class SweepSpec:
    """Which sweep family to use and for how long.

    ``amplitude_compensation`` only affects the exponential families; the
    linear family is shaped in the frequency domain and carries no envelope.
    """

    family: str
    duration_s: float
    amplitude_compensation: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidRangeError(
                f"unknown sweep family {self.family!r}, expected one of {FAMILIES}"
            )


def _check_duration(duration_s: float, n: int, sample_rate_hz: float) -> None:
    if not 0 < duration_s <= n / sample_rate_hz:
        raise InvalidDurationError(
            f"sweep duration must satisfy 0 < T <= n/fs = {n / sample_rate_hz}, "
            f"got {duration_s}"
        )


def _curve_from_half(half: np.ndarray, sample_rate_hz: float) -> PhaseCurve:
    """Assemble a full curve from phases on bins 0..N/2.

    The closed-form phase at Nyquist is generally not a multiple of pi, so
    that single bin is snapped to the nearest multiple; both the forward and
    the inverse application use the same snapped value, so it cancels exactly.
    """
    half = np.asarray(half, dtype=np.float64)
    n = 2 * (half.shape[0] - 1)
    half = half.copy()
    half[-1] = np.pi * np.round(half[-1] / np.pi)
    phase = np.zeros(n)
    phase[: n // 2 + 1] = half
    phase[n // 2 + 1 :] = -half[1 : n // 2][::-1]
    return PhaseCurve(phase, sample_rate_hz)


def zero_phase_curve(n: int, sample_rate_hz: float) -> PhaseCurve:
    """The identity curve: applying it changes nothing."""
    check_even_length(n, "n")
    return PhaseCurve(np.zeros(n), sample_rate_hz)


def linear_chirp_phase(
    n: int, sample_rate_hz: float, band: BandLimits, duration_s: float
) -> PhaseCurve:
    """Phase curve whose group delay rises linearly across the band.

    Bins at or below the lower band edge get zero phase; inside the band the
    phase is ``-pi * T * (f - f_min)**2 / (f_max - f_min)`` so the group
    delay ``-(1/2pi) dphase/df`` sweeps linearly from 0 to ``duration_s``;
    above the band the curve continues with constant group delay so it stays
    well defined for full-band inputs.

    Parameters
    ----------
    n : int
        Transform length, even.
    sample_rate_hz : float
        Sampling rate in Hz.
    band : BandLimits
        Sweep band; validated against the Nyquist frequency.
    duration_s : float
        Sweep duration T, ``0 < T <= n / sample_rate_hz``.
    """
    check_even_length(n, "n")
    check_positive(sample_rate_hz, "sample_rate_hz")
    band.validate_for(sample_rate_hz)
    _check_duration(duration_s, n, sample_rate_hz)

    f_lo, f_hi = band.f_min_hz, band.f_max_hz
    freqs = np.arange(n // 2 + 1) * (sample_rate_hz / n)
    half = np.zeros(n // 2 + 1)
    inside = (freqs > f_lo) & (freqs <= f_hi)
    half[inside] = -np.pi * duration_s * (freqs[inside] - f_lo) ** 2 / (f_hi - f_lo)
    above = freqs > f_hi
    edge = -np.pi * duration_s * (f_hi - f_lo)
    half[above] = edge - 2.0 * np.pi * duration_s * (freqs[above] - f_hi)
    return _curve_from_half(half, sample_rate_hz)


def exponential_frequency(
    t, omega_min: float, omega_max: float, duration_s: float
):
    """Instantaneous frequency (rad/s) of the exponential sweep at time ``t``."""
    t = np.asarray(t, dtype=np.float64)
    return omega_min * (omega_max / omega_min) ** (t / duration_s)


def exponential_phase(t, omega_min: float, omega_max: float, duration_s: float):
    """Phase (rad) of the exponential sweep at time ``t``; zero at ``t = 0``."""
    t = np.asarray(t, dtype=np.float64)
    log_ratio = np.log(omega_max / omega_min)
    return (
        omega_min
        * duration_s
        / log_ratio
        * ((omega_max / omega_min) ** (t / duration_s) - 1.0)
    )


def exponential_frequency_from_dc(t, omega_max: float, duration_s: float):
    """Instantaneous frequency (rad/s) of the DC-start sweep at time ``t``."""
    t = np.asarray(t, dtype=np.float64)
    return (omega_max + 1.0) ** (t / duration_s) - 1.0


def exponential_phase_from_dc(t, omega_max: float, duration_s: float):
    """Phase (rad) of the DC-start sweep at time ``t``; zero at ``t = 0``."""
    t = np.asarray(t, dtype=np.float64)
    log_top = np.log(omega_max + 1.0)
    return duration_s / log_top * ((omega_max + 1.0) ** (t / duration_s) - 1.0) - t


def _sweep_signal(
    n: int,
    sample_rate_hz: float,
    duration_s: float,
    phase_of_t,
    envelope_of_t,
) -> RealSignal:
    # Samples past the sweep end stay zero; letting the law continue would
    # push the instantaneous frequency past its design maximum and alias.
    n_active = min(n, int(round(duration_s * sample_rate_hz)))
    if n_active < 2:
        raise InvalidDurationError(
            f"sweep duration {duration_s} s spans fewer than two samples"
        )
    t = np.arange(n_active) / sample_rate_hz
    samples = np.zeros(n)
    samples[:n_active] = envelope_of_t(t) * np.sin(phase_of_t(t))
    return RealSignal(samples, sample_rate_hz)


def exponential_sweep(
    n: int,
    sample_rate_hz: float,
    omega_min: float,
    omega_max: float,
    duration_s: float,
    amplitude_compensation: bool = True,
) -> SweepResult:
    """Exponential sweep between two angular frequencies.

    The instantaneous frequency follows
    ``omega(t) = omega_min * (omega_max / omega_min)**(t / T)`` and the
    signal is ``a(t) * sin(phase(t))`` with the phase the integral of the
    frequency law, zero at ``t = 0``.  The compensation envelope is the
    inverse of the frequency law's derivative, ``a(t) = (d omega/dt)**-1``,
    normalized to unit peak; it weights the slowly swept low end up relative
    to the fast-swept high end.

    Parameters
    ----------
    n : int
        Signal length; samples beyond ``duration_s`` are zero.
    sample_rate_hz : float
        Sampling rate in Hz.
    omega_min, omega_max : float
        Start and end frequency in rad/s, ``0 < omega_min < omega_max <=
        pi * sample_rate_hz``.
    duration_s : float
        Sweep duration, ``0 < T <= n / sample_rate_hz``.
    amplitude_compensation : bool, optional
        Disable to get a constant unit envelope.

    Returns
    -------
    SweepResult
        The sweep signal and the phase curve that inverts its analytic
        phase law on the bin grid.
    """
    check_even_length(n, "n")
    check_positive(sample_rate_hz, "sample_rate_hz")
    if not 0 < omega_min < omega_max <= np.pi * sample_rate_hz:
        raise InvalidRangeError(
            f"need 0 < omega_min < omega_max <= pi*fs = {np.pi * sample_rate_hz}, "
            f"got omega_min={omega_min}, omega_max={omega_max}"
        )
    _check_duration(duration_s, n, sample_rate_hz)

    ratio = omega_max / omega_min

    def envelope(t):
        if not amplitude_compensation:
            return np.ones_like(t)
        return ratio ** (-t / duration_s)

    signal = _sweep_signal(
        n,
        sample_rate_hz,
        duration_s,
        lambda t: exponential_phase(t, omega_min, omega_max, duration_s),
        envelope,
    )

    # Inversion curve: group delay at frequency f is the time the sweep
    # passes f, tau(f) = T * ln(f/f_lo) / ln(f_hi/f_lo); the phase is the
    # negated integral -2pi * int tau df, zero at and below the start
    # frequency, continued with constant group delay T above the end.
    f_lo = omega_min / (2.0 * np.pi)
    f_hi = omega_max / (2.0 * np.pi)
    log_ratio = np.log(ratio)
    freqs = np.arange(n // 2 + 1) * (sample_rate_hz / n)
    half = np.zeros(n // 2 + 1)
    inside = (freqs > f_lo) & (freqs <= f_hi)
    fm = freqs[inside]
    coeff = 2.0 * np.pi * duration_s / log_ratio
    half[inside] = -coeff * (fm * np.log(fm / f_lo) - fm + f_lo)
    above = freqs > f_hi
    edge = -coeff * (f_hi * np.log(f_hi / f_lo) - f_hi + f_lo)
    half[above] = edge - 2.0 * np.pi * duration_s * (freqs[above] - f_hi)
    return SweepResult(signal, _curve_from_half(half, sample_rate_hz))


def exponential_sweep_from_dc(
    n: int,
    sample_rate_hz: float,
    omega_max: float,
    duration_s: float,
    amplitude_compensation: bool = True,
) -> SweepResult:
    """Exponential sweep that starts at DC.

    The frequency law ``omega(t) = (omega_max + 1)**(t / T) - 1`` passes
    through zero at ``t = 0``, so the sweep needs no lower band edge; the
    first oscillation is arbitrarily slow.  Otherwise behaves like
    :func:`exponential_sweep`.
    """
    check_even_length(n, "n")
    check_positive(sample_rate_hz, "sample_rate_hz")
    if not 0 < omega_max <= np.pi * sample_rate_hz:
        raise InvalidRangeError(
            f"need 0 < omega_max <= pi*fs = {np.pi * sample_rate_hz}, "
            f"got omega_max={omega_max}"
        )
    _check_duration(duration_s, n, sample_rate_hz)

    top = omega_max + 1.0
    log_top = np.log(top)

    def envelope(t):
        if not amplitude_compensation:
            return np.ones_like(t)
        return top ** (-t / duration_s)

    signal = _sweep_signal(
        n,
        sample_rate_hz,
        duration_s,
        lambda t: exponential_phase_from_dc(t, omega_max, duration_s),
        envelope,
    )

    # Group delay tau(f) = T * ln(2 pi f + 1) / ln(omega_max + 1) starts at
    # zero for f = 0; its negated integral gives the phase below the end
    # frequency, continued with constant group delay T above it.
    f_hi = omega_max / (2.0 * np.pi)
    freqs = np.arange(n // 2 + 1) * (sample_rate_hz / n)
    half = np.zeros(n // 2 + 1)
    low = freqs <= f_hi
    w = 2.0 * np.pi * freqs[low]
    half[low] = -(duration_s / log_top) * ((w + 1.0) * (np.log(w + 1.0) - 1.0) + 1.0)
    above = freqs > f_hi
    edge = -(duration_s / log_top) * ((omega_max + 1.0) * (log_top - 1.0) + 1.0)
    half[above] = edge - 2.0 * np.pi * duration_s * (freqs[above] - f_hi)
    return SweepResult(signal, _curve_from_half(half, sample_rate_hz))


def apply_allpass(spectrum: Spectrum, curve: PhaseCurve) -> Spectrum:
    """Multiply a spectrum by ``exp(1j * phase)`` bin by bin.

    Bin magnitudes are preserved to round-off; the hermitian flag carries
    over because the curve's symmetry keeps the multiplier
    conjugate-symmetric.
    """
    check_same_grid(spectrum, curve, "spectrum and phase curve")
    return Spectrum(
        spectrum.bins * np.exp(1j * curve.phase),
        spectrum.sample_rate_hz,
        hermitian=spectrum.hermitian,
    )


def invert_phase(curve: PhaseCurve) -> PhaseCurve:
    """The inverse curve; applying both in sequence is the identity."""
    return PhaseCurve(-curve.phase, curve.sample_rate_hz)


def make_reference(
    n: int, sample_rate_hz: float, band: BandLimits, sweep: SweepSpec
) -> Reference:
    """Build a reference excitation and everything needed to undo it.

    For the linear family the band-limited impulse is chirped by the linear
    phase curve and transformed to time; for the exponential families the
    time-domain constructions are used directly; family ``"none"`` yields
    the bare band-limited impulse with a zero curve.  The time signal is
    normalized to unit peak and the applied scale factor is returned so
    recovery can restore original units exactly.

    Returns
    -------
    Reference
        ``signal`` with peak ``|r| = 1``, the inversion ``phase`` curve, and
        the ``scale`` the raw construction was divided by.
    """
    check_even_length(n, "n")
    check_positive(sample_rate_hz, "sample_rate_hz")
    band.validate_for(sample_rate_hz)

    if sweep.family == "linear":
        curve = linear_chirp_phase(n, sample_rate_hz, band, sweep.duration_s)
        raw = idft(apply_allpass(band_limited_impulse(n, sample_rate_hz, band), curve))
    elif sweep.family == "none":
        curve = zero_phase_curve(n, sample_rate_hz)
        raw = time_domain_impulse(n, sample_rate_hz, band)
    elif sweep.family == "exp1":
        raw, curve = exponential_sweep(
            n,
            sample_rate_hz,
            2.0 * np.pi * band.f_min_hz,
            2.0 * np.pi * band.f_max_hz,
            sweep.duration_s,
            sweep.amplitude_compensation,
        )
    else:  # exp2
        raw, curve = exponential_sweep_from_dc(
            n,
            sample_rate_hz,
            2.0 * np.pi * band.f_max_hz,
            sweep.duration_s,
            sweep.amplitude_compensation,
        )

    scale = float(np.max(np.abs(raw.samples)))
    if scale == 0.0:
        raise ZeroSignalError("reference construction produced an all-zero signal")
    return Reference(
        RealSignal(raw.samples / scale, sample_rate_hz), curve, scale
    )
