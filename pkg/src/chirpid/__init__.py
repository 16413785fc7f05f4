"""Band-limited FIR system identification with allpass-chirped excitations.

A band-limited impulse is spread in time by an allpass chirp, played through
an unknown system, and the recorded response is collapsed back by applying
the inverse phase curve.  Because the allpass step only rotates phase, the
recovery never divides by the excitation spectrum and stays finite even when
the excitation has empty bins.
"""

from .chirp import (
    FAMILIES,
    PhaseCurve,
    Reference,
    SweepResult,
    SweepSpec,
    apply_allpass,
    exponential_frequency,
    exponential_frequency_from_dc,
    exponential_phase,
    exponential_phase_from_dc,
    exponential_sweep,
    exponential_sweep_from_dc,
    invert_phase,
    linear_chirp_phase,
    make_reference,
    zero_phase_curve,
)
from .errors import (
    ChirpIdError,
    ClippingError,
    DivisionBlowupError,
    EmptyBandError,
    EmptySetError,
    InvalidBandError,
    InvalidCountError,
    InvalidDurationError,
    InvalidRangeError,
    NonHermitianError,
    ParseError,
    ShapeMismatchError,
    UnsupportedFormatError,
    ZeroSignalError,
)
from .estimator import ImpulseResponseEstimator
from .fileio import (
    FORMATS,
    SignalFile,
    decode_wav,
    encode_wav,
    parse_phase_curve_csv,
    parse_signal_csv,
    phase_curve_csv_text,
    read_phase_curve_csv,
    read_signal,
    signal_csv_text,
    spectrum_csv_text,
    write_phase_curve_csv,
    write_signal,
    write_spectrum_csv,
)
from .impulse import BandLimits, band_limited_impulse, time_domain_impulse
from .recovery import (
    DEFAULT_GUARD_BINS,
    RecoveryResult,
    in_band_error,
    naive_deconvolve,
    recover_impulse_model,
)
from .signals import RealSignal, Spectrum, dft, energy, idft, multiply
from .simulate import (
    CaptureSet,
    SystemModel,
    add_noise,
    capture_seed,
    force_system,
    random_fir_system,
    simulate_captures,
    stack_captures,
)

__version__ = "0.1.0"

__all__ = [
    "BandLimits",
    "CaptureSet",
    "ChirpIdError",
    "ClippingError",
    "DEFAULT_GUARD_BINS",
    "DivisionBlowupError",
    "EmptyBandError",
    "EmptySetError",
    "FAMILIES",
    "FORMATS",
    "ImpulseResponseEstimator",
    "InvalidBandError",
    "InvalidCountError",
    "InvalidDurationError",
    "InvalidRangeError",
    "NonHermitianError",
    "ParseError",
    "PhaseCurve",
    "RealSignal",
    "RecoveryResult",
    "Reference",
    "ShapeMismatchError",
    "SignalFile",
    "Spectrum",
    "SweepResult",
    "SweepSpec",
    "SystemModel",
    "UnsupportedFormatError",
    "ZeroSignalError",
    "add_noise",
    "apply_allpass",
    "band_limited_impulse",
    "capture_seed",
    "decode_wav",
    "dft",
    "encode_wav",
    "energy",
    "exponential_frequency",
    "exponential_frequency_from_dc",
    "exponential_phase",
    "exponential_phase_from_dc",
    "exponential_sweep",
    "exponential_sweep_from_dc",
    "force_system",
    "idft",
    "in_band_error",
    "invert_phase",
    "linear_chirp_phase",
    "make_reference",
    "multiply",
    "naive_deconvolve",
    "parse_phase_curve_csv",
    "parse_signal_csv",
    "phase_curve_csv_text",
    "random_fir_system",
    "read_phase_curve_csv",
    "read_signal",
    "recover_impulse_model",
    "signal_csv_text",
    "simulate_captures",
    "spectrum_csv_text",
    "stack_captures",
    "time_domain_impulse",
    "write_phase_curve_csv",
    "write_signal",
    "write_spectrum_csv",
    "zero_phase_curve",
]
