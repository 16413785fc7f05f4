"""Scikit-learn style front end for the identification pipeline.

The estimator wraps excitation generation, capture stacking, and impulse
recovery behind the familiar ``fit`` / ``predict`` surface, so it composes
with ``sklearn.base.clone``, ``get_params`` and friends.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .chirp import Reference, SweepSpec, make_reference
from .errors import ShapeMismatchError
from .impulse import BandLimits
from .recovery import DEFAULT_GUARD_BINS, recover_impulse_model
from .signals import RealSignal
from .simulate import CaptureSet, stack_captures


class ImpulseResponseEstimator(BaseEstimator):
    """Identify a band-limited FIR model from swept-excitation captures.

    Play :meth:`reference` through the system under test, then pass the
    captured responses to :meth:`fit`.  The identified model is a circular
    FIR response over the excitation window; :meth:`predict` applies it to
    new input signals.

    Parameters
    ----------
    n_samples : int
        Excitation and capture length, even.
    sample_rate_hz : float
        Sampling rate in Hz.
    f_min_hz, f_max_hz : float
        Analysis band edges.
    sweep : str
        Sweep family: ``"linear"``, ``"exp1"``, ``"exp2"``, or ``"none"``.
    duration_s : float
        Sweep duration in seconds.
    amplitude_compensation : bool
        Envelope compensation for the exponential families.
    guard_bins : int
        Edge bins excluded from the in-band error metric.

    Attributes
    ----------
    reference_ : Reference
        The excitation used for the fit (signal, phase curve, scale).
    impulse_response_ : ndarray
        Recovered band-limited impulse response, length ``n_samples``.
    model_spectrum_ : ndarray
        Its complex spectrum.
    in_band_error_ : float or None
        Relative in-band error against the true system, when ``fit`` was
        given one.
    """

    def __init__(
        self,
        n_samples: int = 4096,
        sample_rate_hz: float = 48000.0,
        f_min_hz: float = 100.0,
        f_max_hz: float = 20000.0,
        sweep: str = "linear",
        duration_s: float = 0.06,
        amplitude_compensation: bool = True,
        guard_bins: int = DEFAULT_GUARD_BINS,
    ):
        self.n_samples = n_samples
        self.sample_rate_hz = sample_rate_hz
        self.f_min_hz = f_min_hz
        self.f_max_hz = f_max_hz
        self.sweep = sweep
        self.duration_s = duration_s
        self.amplitude_compensation = amplitude_compensation
        self.guard_bins = guard_bins

    def _band(self) -> BandLimits:
        return BandLimits(self.f_min_hz, self.f_max_hz)

    def reference(self) -> Reference:
        """The excitation to play through the system under test."""
        sweep = SweepSpec(self.sweep, self.duration_s, self.amplitude_compensation)
        return make_reference(self.n_samples, self.sample_rate_hz, self._band(), sweep)

    def _as_captures(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[np.newaxis, :]
        if X.ndim != 2:
            raise ShapeMismatchError(
                f"X must be a capture (n,) or captures (m, n), got shape {X.shape}"
            )
        if X.shape[1] != self.n_samples:
            raise ShapeMismatchError(
                f"captures have {X.shape[1]} samples, estimator expects "
                f"{self.n_samples}"
            )
        return X

    def fit(self, X, y=None):
        """Recover the impulse model from one or more captures.

        Parameters
        ----------
        X : array_like
            A single capture of shape ``(n_samples,)`` or a stack of
            repeated captures of shape ``(m, n_samples)``, which are
            averaged before recovery.
        y : array_like, optional
            True system taps of length ``n_samples``; when given,
            ``in_band_error_`` reports the recovery error against them.
        """
        X = self._as_captures(X)
        reference = self.reference()
        fs = self.sample_rate_hz
        capture = stack_captures(
            CaptureSet(tuple(RealSignal(row, fs) for row in X))
        )
        truth = None
        if y is not None:
            truth = RealSignal(np.asarray(y, dtype=np.float64), fs)
            if truth.n != self.n_samples:
                raise ShapeMismatchError(
                    f"true system has {truth.n} taps, expected {self.n_samples}"
                )
        result = recover_impulse_model(
            capture,
            reference.phase,
            self._band(),
            scale=reference.scale,
            reference_system=truth,
            guard_bins=self.guard_bins,
        )
        self.reference_ = reference
        self.recovery_ = result
        self.impulse_response_ = result.model.samples
        self.model_spectrum_ = result.model_spectrum.bins
        self.in_band_error_ = result.in_band_error
        return self

    def predict(self, X) -> np.ndarray:
        """Apply the identified model to input signals.

        Each row of ``X`` is circularly convolved with the recovered
        impulse response; shape is preserved.
        """
        if not hasattr(self, "impulse_response_"):
            raise NotFittedError(
                "this ImpulseResponseEstimator is not fitted yet; call fit first"
            )
        X = np.asarray(X, dtype=np.float64)
        squeeze = X.ndim == 1
        rows = self._as_captures(X)
        spectrum = np.fft.fft(self.impulse_response_)
        out = np.fft.ifft(np.fft.fft(rows, axis=1) * spectrum, axis=1).real
        return out[0] if squeeze else out
