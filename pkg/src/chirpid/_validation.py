"""Input validation helpers shared by the containers and the estimator."""

from __future__ import annotations

import numpy as np

from .errors import InvalidRangeError, ShapeMismatchError


def as_float_array(values, name: str = "samples") -> np.ndarray:
    """Coerce to a 1-D float64 array of finite values."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidRangeError(f"{name} contains non-finite values")
    return arr


def as_complex_array(values, name: str = "bins") -> np.ndarray:
    """Coerce to a 1-D complex128 array of finite values."""
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ShapeMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidRangeError(f"{name} contains non-finite values")
    return arr


def check_even_length(n: int, name: str = "signal") -> None:
    if n < 2 or n % 2 != 0:
        raise ShapeMismatchError(f"{name} length must be even and >= 2, got {n}")


def check_positive(value: float, name: str) -> None:
    if not value > 0:
        raise InvalidRangeError(f"{name} must be positive, got {value}")


def check_same_grid(a, b, what: str = "operands") -> None:
    """Require matching length and sample rate of two container objects."""
    if a.n != b.n:
        raise ShapeMismatchError(f"{what} lengths differ: {a.n} vs {b.n}")
    if a.sample_rate_hz != b.sample_rate_hz:
        raise ShapeMismatchError(
            f"{what} sample rates differ: {a.sample_rate_hz} vs {b.sample_rate_hz}"
        )


def hermitian_defect(bins: np.ndarray) -> float:
    """Max absolute deviation from conjugate symmetry, bins[N-k] = conj(bins[k])."""
    n = bins.shape[0]
    mirrored = bins[(-np.arange(n)) % n]
    return float(np.max(np.abs(bins - np.conj(mirrored))))


def phase_mod_pi_defect(value: float) -> float:
    """Distance from ``value`` to the nearest integer multiple of pi."""
    return float(abs(value - np.pi * np.round(value / np.pi)))


def lock(arr: np.ndarray) -> np.ndarray:
    """Make an array read-only so frozen containers stay immutable."""
    arr.flags.writeable = False
    return arr
