"""Exception types shared across the package."""


class ChirpIdError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatchError(ChirpIdError, ValueError):
    """Operands differ in length or sample rate."""


class NonHermitianError(ChirpIdError, ValueError):
    """A spectrum that must correspond to a real signal is not conjugate-symmetric."""


class InvalidBandError(ChirpIdError, ValueError):
    """Frequency band edges are out of order or outside [0, fs/2]."""


class InvalidDurationError(ChirpIdError, ValueError):
    """A sweep duration is nonpositive or longer than the signal window."""


class InvalidRangeError(ChirpIdError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class InvalidCountError(ChirpIdError, ValueError):
    """A count parameter is nonpositive or exceeds its bound."""


class ZeroSignalError(ChirpIdError, ValueError):
    """An operation that needs signal energy received an all-zero signal."""


class EmptySetError(ChirpIdError, ValueError):
    """A collection that must be nonempty is empty."""


class EmptyBandError(ChirpIdError, ValueError):
    """Guard bins consumed the whole analysis band."""


class ClippingError(ChirpIdError, ValueError):
    """Samples exceed full scale for an integer PCM format."""


class ParseError(ChirpIdError, ValueError):
    """A file could not be decoded; the message names the offending part."""


class UnsupportedFormatError(ChirpIdError, ValueError):
    """A file format or encoding this package does not handle."""


class DivisionBlowupError(ChirpIdError, ArithmeticError):
    """Bin-wise spectral division hit zero-magnitude denominators.

    Attributes
    ----------
    bins : tuple of int
        Every bin index whose denominator has zero magnitude.
    spectrum : numpy.ndarray
        The IEEE quotient (``inf``/``nan`` at the offending bins), kept so
        callers can report the blowup instead of losing the result.
    """

    def __init__(self, bins, spectrum):
        self.bins = tuple(int(b) for b in bins)
        self.spectrum = spectrum
        head = ", ".join(str(b) for b in self.bins[:8])
        tail = "" if len(self.bins) <= 8 else f", ... ({len(self.bins)} bins total)"
        super().__init__(
            f"division by zero-magnitude denominator at bins [{head}{tail}]"
        )
