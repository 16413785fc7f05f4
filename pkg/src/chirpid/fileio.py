"""WAV and CSV persistence for signals, spectra, and phase curves.

WAV files are canonical RIFF/WAVE with a 16-byte ``fmt `` chunk and a
``data`` chunk, little-endian throughout: PCM (format tag 1) at 16 or 24
bits, or IEEE float (tag 3) at 32 bits.  Encoding is fully deterministic, so
equal inputs produce byte-identical files.

CSV formats, one value per row with a mandatory header:

* signal:      ``index,time_s,value``
* spectrum:    ``bin,freq_hz,real,imag,magnitude,phase_rad`` for bins 0..N/2
* phase curve: ``bin,freq_hz,phase_rad,scale`` for bins 0..N/2, where the
  constant ``scale`` column records the reference normalization factor so a
  file alone suffices for exact inversion

Floats are written with 17 significant digits, which round-trips float64
exactly.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chirp import PhaseCurve
from .errors import (
    ClippingError,
    InvalidRangeError,
    ParseError,
    UnsupportedFormatError,
)
from .signals import RealSignal, Spectrum

FORMATS = ("wav_pcm16", "wav_pcm24", "wav_float32", "csv")

SIGNAL_HEADER = ["index", "time_s", "value"]
SPECTRUM_HEADER = ["bin", "freq_hz", "real", "imag", "magnitude", "phase_rad"]
PHASE_HEADER = ["bin", "freq_hz", "phase_rad", "scale"]

_PCM16_FULL_SCALE = 32767.0
_PCM24_FULL_SCALE = 8388607.0


@dataclass(frozen=True)
class SignalFile:
    """A signal file location with its encoding.

    ``format`` is one of ``wav_pcm16``, ``wav_pcm24``, ``wav_float32``,
    ``csv``, or None to infer from the extension (``.wav`` defaults to
    float32 when writing; reading always trusts the WAV header).
    ``channel`` selects which channel to read from multichannel files.
    """

    path: Path
    format: str | None = None
    channel: int = 0

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        if self.format is not None and self.format not in FORMATS:
            raise UnsupportedFormatError(
                f"unknown format {self.format!r}, expected one of {FORMATS}"
            )

    def resolved_format(self) -> str:
        if self.format is not None:
            return self.format
        suffix = self.path.suffix.lower()
        if suffix == ".csv":
            return "csv"
        if suffix == ".wav":
            return "wav_float32"
        raise UnsupportedFormatError(
            f"cannot infer format from extension {suffix!r}; "
            "specify one of " + ", ".join(FORMATS)
        )


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _wav_rate(sample_rate_hz: float) -> int:
    rate = round(sample_rate_hz)
    if abs(sample_rate_hz - rate) > 1e-6 or rate <= 0:
        raise UnsupportedFormatError(
            f"WAV requires a positive integer sample rate, got {sample_rate_hz}"
        )
    return int(rate)


def encode_wav(samples: np.ndarray, sample_rate_hz: float, fmt: str) -> bytes:
    """Encode mono samples into WAV container bytes."""
    samples = np.asarray(samples, dtype=np.float64)
    rate = _wav_rate(sample_rate_hz)
    if fmt == "wav_float32":
        audio_format, bits = 3, 32
        payload = samples.astype("<f4").tobytes()
    elif fmt in ("wav_pcm16", "wav_pcm24"):
        peak = float(np.max(np.abs(samples))) if samples.size else 0.0
        if peak > 1.0:
            raise ClippingError(
                f"samples peak at {peak}, outside [-1, 1]; "
                "PCM formats cannot represent that"
            )
        audio_format = 1
        if fmt == "wav_pcm16":
            bits = 16
            payload = np.round(samples * _PCM16_FULL_SCALE).astype("<i2").tobytes()
        else:
            bits = 24
            ints = np.round(samples * _PCM24_FULL_SCALE).astype("<i4")
            payload = (
                np.frombuffer(ints.tobytes(), np.uint8).reshape(-1, 4)[:, :3].tobytes()
            )
    else:
        raise UnsupportedFormatError(f"not a WAV format: {fmt!r}")

    channels = 1
    block_align = channels * bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        4 + 8 + 16 + 8 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        audio_format,
        channels,
        rate,
        rate * block_align,
        block_align,
        bits,
        b"data",
        len(payload),
    )
    return header + payload


def decode_wav(data: bytes) -> tuple[np.ndarray, float]:
    """Decode WAV bytes into float64 samples of shape (frames, channels)."""
    if len(data) < 12:
        raise ParseError("RIFF header truncated")
    magic, _, wave = struct.unpack_from("<4sI4s", data, 0)
    if magic != b"RIFF" or wave != b"WAVE":
        raise ParseError("not a RIFF/WAVE file")

    pos = 12
    fmt_fields = None
    while pos + 8 <= len(data):
        chunk_id, chunk_size = struct.unpack_from("<4sI", data, pos)
        name = chunk_id.decode("latin-1")
        pos += 8
        if pos + chunk_size > len(data):
            raise ParseError(
                f"{name!r} chunk truncated: declares {chunk_size} bytes, "
                f"{len(data) - pos} available"
            )
        body = data[pos : pos + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise ParseError("'fmt ' chunk truncated: shorter than 16 bytes")
            fmt_fields = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if fmt_fields is None:
                raise ParseError("'data' chunk appears before 'fmt ' chunk")
            return _decode_frames(body, fmt_fields)
        pos += chunk_size + (chunk_size & 1)
    if fmt_fields is None:
        raise ParseError("missing 'fmt ' chunk")
    raise ParseError("missing 'data' chunk")


def _decode_frames(body: bytes, fmt_fields) -> tuple[np.ndarray, float]:
    audio_format, channels, rate, _, block_align, bits = fmt_fields
    if channels < 1 or block_align != channels * bits // 8:
        raise ParseError("'fmt ' chunk is inconsistent")
    if len(body) % block_align != 0:
        raise ParseError("'data' chunk truncated mid-frame")
    if audio_format == 1 and bits == 16:
        flat = np.frombuffer(body, "<i2").astype(np.float64) / _PCM16_FULL_SCALE
    elif audio_format == 1 and bits == 24:
        raw = np.frombuffer(body, np.uint8).reshape(-1, 3).astype(np.int64)
        ints = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        ints = np.where(ints & 0x800000, ints - (1 << 24), ints)
        flat = ints.astype(np.float64) / _PCM24_FULL_SCALE
    elif audio_format == 3 and bits == 32:
        flat = np.frombuffer(body, "<f4").astype(np.float64)
    else:
        raise UnsupportedFormatError(
            f"unsupported WAV encoding: format tag {audio_format}, {bits} bits"
        )
    return flat.reshape(-1, channels), float(rate)


def signal_csv_text(x: RealSignal) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SIGNAL_HEADER)
    for i, v in enumerate(x.samples):
        writer.writerow([i, _fmt(i / x.sample_rate_hz), _fmt(v)])
    return buf.getvalue()


def parse_signal_csv(text: str, sample_rate_hz: float) -> RealSignal:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != SIGNAL_HEADER:
        raise ParseError(
            f"signal CSV must start with header {','.join(SIGNAL_HEADER)!r}"
        )
    values = np.empty(len(rows) - 1)
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ParseError(f"signal CSV row {line_no} has {len(row)} fields, not 3")
        try:
            values[line_no - 2] = float(row[2])
        except ValueError:
            raise ParseError(
                f"non-numeric value {row[2]!r} in signal CSV row {line_no}"
            ) from None
    return RealSignal(values, sample_rate_hz)


def spectrum_csv_text(spectrum: Spectrum) -> str:
    """Spectrum as CSV over the non-redundant bins 0..N/2."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPECTRUM_HEADER)
    n, fs = spectrum.n, spectrum.sample_rate_hz
    for k in range(n // 2 + 1):
        b = spectrum.bins[k]
        writer.writerow(
            [
                k,
                _fmt(k * fs / n),
                _fmt(b.real),
                _fmt(b.imag),
                _fmt(abs(b)),
                _fmt(np.angle(b)),
            ]
        )
    return buf.getvalue()


def phase_curve_csv_text(curve: PhaseCurve, scale: float = 1.0) -> str:
    """Phase curve as CSV over bins 0..N/2, with the reference scale."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PHASE_HEADER)
    n, fs = curve.n, curve.sample_rate_hz
    for k in range(n // 2 + 1):
        writer.writerow([k, _fmt(k * fs / n), _fmt(curve.phase[k]), _fmt(scale)])
    return buf.getvalue()


def parse_phase_curve_csv(text: str) -> tuple[PhaseCurve, float]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != PHASE_HEADER:
        raise ParseError(
            f"phase curve CSV must start with header {','.join(PHASE_HEADER)!r}"
        )
    body = rows[1:]
    if len(body) < 2:
        raise ParseError("phase curve CSV needs at least bins 0 and N/2")
    half = np.empty(len(body))
    scales = np.empty(len(body))
    nyquist_hz = None
    for line_no, row in enumerate(body, start=2):
        if len(row) != 4:
            raise ParseError(
                f"phase curve CSV row {line_no} has {len(row)} fields, not 4"
            )
        try:
            k = int(row[0])
            freq = float(row[1])
            half[line_no - 2] = float(row[2])
            scales[line_no - 2] = float(row[3])
        except ValueError:
            raise ParseError(
                f"non-numeric value in phase curve CSV row {line_no}"
            ) from None
        if k != line_no - 2:
            raise ParseError(
                f"phase curve CSV row {line_no} has bin {k}, expected {line_no - 2}"
            )
        nyquist_hz = freq
    if np.any(scales != scales[0]):
        raise ParseError("phase curve CSV scale column is not constant")
    if nyquist_hz is None or nyquist_hz <= 0:
        raise ParseError("phase curve CSV Nyquist frequency must be positive")
    n = 2 * (len(body) - 1)
    phase = np.zeros(n)
    phase[: n // 2 + 1] = half
    phase[n // 2 + 1 :] = -half[1 : n // 2][::-1]
    return PhaseCurve(phase, 2.0 * nyquist_hz), float(scales[0])


def write_signal(x: RealSignal, file: SignalFile) -> None:
    """Write a signal in the file's format (WAV variants or CSV)."""
    fmt = file.resolved_format()
    if fmt == "csv":
        file.path.write_text(signal_csv_text(x), encoding="utf-8")
    else:
        file.path.write_bytes(encode_wav(x.samples, x.sample_rate_hz, fmt))


def read_signal(file: SignalFile, sample_rate_hz: float | None = None) -> RealSignal:
    """Read a signal back.

    WAV files carry their rate in the header (a conflicting
    ``sample_rate_hz`` argument is rejected); CSV files require the rate to
    be supplied.  For multichannel WAV input, ``file.channel`` selects the
    channel.
    """
    fmt = file.resolved_format()
    if fmt == "csv":
        if sample_rate_hz is None:
            raise InvalidRangeError(
                "sample_rate_hz is required to read signal CSV files"
            )
        return parse_signal_csv(file.path.read_text(encoding="utf-8"), sample_rate_hz)
    frames, rate = decode_wav(file.path.read_bytes())
    if sample_rate_hz is not None and sample_rate_hz != rate:
        raise InvalidRangeError(
            f"requested rate {sample_rate_hz} conflicts with WAV header rate {rate}"
        )
    if not 0 <= file.channel < frames.shape[1]:
        raise InvalidRangeError(
            f"channel {file.channel} requested but file has {frames.shape[1]}"
        )
    return RealSignal(frames[:, file.channel], rate)


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    Path(path).write_text(spectrum_csv_text(spectrum), encoding="utf-8")


def write_phase_curve_csv(curve: PhaseCurve, path, scale: float = 1.0) -> None:
    Path(path).write_text(phase_curve_csv_text(curve, scale), encoding="utf-8")


def read_phase_curve_csv(path) -> tuple[PhaseCurve, float]:
    return parse_phase_curve_csv(Path(path).read_text(encoding="utf-8"))
