"""Estimator facade: sklearn conventions plus identification accuracy."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from chirpid import (
    BandLimits,
    ImpulseResponseEstimator,
    ShapeMismatchError,
    dft,
    force_system,
    random_fir_system,
)

from oracles import circular_convolve_direct

N, FS = 1024, 16000.0


def _estimator(**overrides):
    params = dict(
        n_samples=N,
        sample_rate_hz=FS,
        f_min_hz=200.0,
        f_max_hz=6000.0,
        duration_s=0.02,
    )
    params.update(overrides)
    return ImpulseResponseEstimator(**params)


def _capture(est, seed=0):
    system = random_fir_system(
        est.n_samples, est.sample_rate_hz, est.n_samples // 4, seed=seed
    )
    y = force_system(system, est.reference().signal)
    return system, y


class TestSklearnConventions:
    def test_get_params_round_trip(self):
        est = _estimator(guard_bins=3)
        params = est.get_params()
        assert params["n_samples"] == N
        assert params["guard_bins"] == 3
        rebuilt = ImpulseResponseEstimator(**params)
        assert rebuilt.get_params() == params

    def test_set_params_chains(self):
        est = _estimator().set_params(sweep="none", duration_s=0.01)
        assert est.sweep == "none"
        assert est.duration_s == 0.01

    def test_clone_preserves_params(self):
        est = _estimator(sweep="exp1")
        assert clone(est).get_params() == est.get_params()

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            _estimator().predict(np.zeros(N))


class TestFit:
    def test_noiseless_fit_is_exact(self):
        est = _estimator()
        system, y = _capture(est, seed=11)
        est.fit(y.samples, y=system.taps.samples)
        assert est.in_band_error_ < 1e-9
        assert est.impulse_response_.shape == (N,)
        assert est.model_spectrum_.shape == (N,)

    def test_error_attribute_absent_without_truth(self):
        est = _estimator()
        _, y = _capture(est, seed=11)
        est.fit(y.samples)
        assert est.in_band_error_ is None

    def test_two_dimensional_captures_are_stacked(self):
        est = _estimator()
        system, y = _capture(est, seed=12)
        stacked = np.vstack([y.samples, y.samples, y.samples])
        est.fit(stacked, y=system.taps.samples)
        assert est.in_band_error_ < 1e-9

    def test_fit_returns_self(self):
        est = _estimator()
        _, y = _capture(est)
        assert est.fit(y.samples) is est

    def test_wrong_length_rejected(self):
        est = _estimator()
        with pytest.raises(ShapeMismatchError):
            est.fit(np.zeros(N // 2))
        with pytest.raises(ShapeMismatchError):
            est.fit(np.zeros((2, N // 2)))

    def test_wrong_truth_length_rejected(self):
        est = _estimator()
        _, y = _capture(est)
        with pytest.raises(ShapeMismatchError):
            est.fit(y.samples, y=np.zeros(N // 2))


class TestPredict:
    def test_matches_direct_circular_convolution(self):
        est = _estimator(n_samples=128, duration_s=0.005)
        system, y = _capture(est, seed=13)
        est.fit(y.samples)
        rng = np.random.default_rng(14)
        x = rng.standard_normal(128)
        got = est.predict(x)
        expected = circular_convolve_direct(x, est.impulse_response_)
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-9)

    def test_shape_is_preserved(self):
        est = _estimator(n_samples=128, duration_s=0.005)
        _, y = _capture(est, seed=13)
        est.fit(y.samples)
        assert est.predict(np.zeros(128)).shape == (128,)
        assert est.predict(np.zeros((3, 128))).shape == (3, 128)

    def test_identified_model_predicts_the_capture(self):
        # Playing the reference through the fitted model reproduces the
        # capture's in-band spectrum, scaled by the impulse weight 2/N.
        est = _estimator()
        _, y = _capture(est, seed=15)
        est.fit(y.samples)
        replay = est.predict(est.reference_.signal.samples)
        band = BandLimits(est.f_min_hz, est.f_max_hz)
        mask = band.mask(N, FS)
        got = np.fft.fft(replay)[: N // 2 + 1][mask]
        want = dft(y).bins[: N // 2 + 1][mask] * (2.0 / N)
        top = float(np.max(np.abs(want)))
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-9 * top)
