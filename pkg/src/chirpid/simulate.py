"""Seeded FIR test systems, forcing, and noisy capture simulation.

All randomness comes from numpy's PCG64 bit generator, which is named,
seedable, and stream-stable for a given numpy version, so simulated
measurements reproduce bit for bit from their seeds.  Per-capture noise
seeds are derived from ``SeedSequence((base_seed, capture_index))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_even_length, check_positive
from .errors import (
    EmptySetError,
    InvalidCountError,
    InvalidRangeError,
    ShapeMismatchError,
    ZeroSignalError,
)
from .signals import RealSignal, dft, energy, idft, multiply


@dataclass(frozen=True)
class SystemModel:
    """An FIR system under test, held as its full-length tap vector."""

    taps: RealSignal
    descriptor: str = ""

    def __post_init__(self):
        if not np.any(self.taps.samples):
            raise ZeroSignalError("system must have at least one nonzero tap")


@dataclass(frozen=True)
class CaptureSet:
    """Repeated captures of one measurement, all on the same sample grid."""

    captures: tuple
    snr_db: float | None = None

    def __post_init__(self):
        caps = tuple(self.captures)
        if not caps:
            raise EmptySetError("capture set must contain at least one capture")
        first = caps[0]
        for c in caps[1:]:
            if c.n != first.n or c.sample_rate_hz != first.sample_rate_hz:
                raise ShapeMismatchError(
                    "captures must share length and sample rate"
                )
        object.__setattr__(self, "captures", caps)

    def __len__(self) -> int:
        return len(self.captures)


def random_fir_system(
    n: int, sample_rate_hz: float, active_taps: int, seed: int
) -> SystemModel:
    """Seeded random FIR system with unit-energy taps.

    The first ``active_taps`` coefficients are drawn from a zero-mean
    unit-variance normal stream (PCG64), the rest are zero, and the whole
    vector is normalized to unit energy.

    Parameters
    ----------
    n : int
        Full tap-vector length, even.
    sample_rate_hz : float
        Sampling rate the system operates at.
    active_taps : int
        How many leading taps are nonzero, ``1 <= active_taps <= n``.
    seed : int
        PCG64 seed; equal seeds give bit-identical systems.
    """
    check_even_length(n, "n")
    check_positive(sample_rate_hz, "sample_rate_hz")
    if not 1 <= active_taps <= n:
        raise InvalidCountError(
            f"active_taps must be in [1, {n}], got {active_taps}"
        )
    head = np.random.default_rng(seed).standard_normal(active_taps)
    taps = np.zeros(n)
    taps[:active_taps] = head / np.sqrt(np.sum(head * head))
    return SystemModel(
        RealSignal(taps, sample_rate_hz),
        descriptor=f"pcg64 seed={seed} active_taps={active_taps}",
    )


def force_system(system: SystemModel, excitation: RealSignal) -> RealSignal:
    """Response of the system to an excitation, by circular convolution.

    Computed as the inverse transform of the spectral product, which equals
    direct circular convolution of the tap vector with the excitation.
    """
    return idft(multiply(dft(system.taps), dft(excitation)))


def add_noise(y: RealSignal, snr_db: float, seed) -> RealSignal:
    """Add white Gaussian noise at an exactly realized signal-to-noise ratio.

    The noise vector is rescaled so that ``10*log10(energy(y)/energy(w))``
    equals ``snr_db`` to float precision, not merely in expectation.  An
    infinite ``snr_db`` is the noiseless sentinel: ``y`` comes back
    unchanged.

    Parameters
    ----------
    y : RealSignal
        Clean signal; must carry nonzero energy.
    snr_db : float
        Target ratio in dB, or ``float("inf")`` for no noise.
    seed : int or numpy.random.SeedSequence
        Noise stream seed; different seeds give different noise with the
        identical realized ratio.
    """
    if np.isinf(snr_db):
        if snr_db < 0:
            raise InvalidRangeError("snr_db = -inf is not meaningful")
        return y
    e_signal = energy(y)
    if e_signal == 0.0:
        raise ZeroSignalError("cannot set an SNR against a zero-energy signal")
    noise = np.random.default_rng(seed).standard_normal(y.n)
    e_target = e_signal * 10.0 ** (-snr_db / 10.0)
    noise *= np.sqrt(e_target / np.sum(noise * noise))
    return RealSignal(y.samples + noise, y.sample_rate_hz)


def capture_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    """Deterministic per-capture seed derived from (base seed, capture index)."""
    return np.random.SeedSequence((base_seed, index))


def simulate_captures(
    system: SystemModel,
    excitation: RealSignal,
    snr_db: float,
    stacks: int,
    base_seed: int,
) -> CaptureSet:
    """Force the system and capture it ``stacks`` times with fresh noise."""
    if stacks < 1:
        raise InvalidCountError(f"stacks must be >= 1, got {stacks}")
    clean = force_system(system, excitation)
    return CaptureSet(
        tuple(
            add_noise(clean, snr_db, capture_seed(base_seed, i))
            for i in range(stacks)
        ),
        snr_db=snr_db,
    )


def stack_captures(captures: CaptureSet) -> RealSignal:
    """Arithmetic mean of the captures.

    Averaging M independent captures leaves the coherent response untouched
    and cuts the residual noise energy by a factor of M.
    """
    stacked = np.mean([c.samples for c in captures.captures], axis=0)
    first = captures.captures[0]
    return RealSignal(stacked, first.sample_rate_hz)
