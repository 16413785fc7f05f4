"""Command-line pipeline: gen | simulate | recover | compare.

Every run validates its whole configuration first and reports all problems
at once, computes everything in memory, then stages output files and renames
them into place, so a failing run leaves no partial outputs.  With a fixed
seed, repeated runs produce byte-identical files.

Exit codes: 0 success, 2 usage or validation failure, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

import numpy as np

from .chirp import SweepSpec, apply_allpass, make_reference
from .errors import ChirpIdError, DivisionBlowupError, ShapeMismatchError
from .fileio import (
    SignalFile,
    encode_wav,
    phase_curve_csv_text,
    read_phase_curve_csv,
    read_signal,
    signal_csv_text,
    spectrum_csv_text,
)
from .impulse import BandLimits, band_limited_impulse
from .recovery import naive_deconvolve, in_band_error, recover_impulse_model
from .signals import RealSignal, Spectrum, dft
from .simulate import force_system, random_fir_system, simulate_captures, stack_captures

SWEEP_CHOICES = ("linear", "exp1", "exp2", "none")
DEFAULT_COMPARE_FLOOR = 1e-12

ERROR_TRACE_HEADER = [
    "bin",
    "freq_hz",
    "system_magnitude",
    "model_magnitude",
    "error_magnitude",
]
COMPARE_HEADER = [
    "method",
    "in_band_error",
    "max_out_of_band_magnitude",
    "finite_output",
]

# Config-file values arrive as strings and are cast per destination.
_CASTERS = {
    "n": int,
    "rate": float,
    "t": float,
    "seed": int,
    "stacks": int,
    "guard_bins": int,
    "taps": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chirpid",
        description=(
            "Generate band-limited chirped excitations, simulate FIR captures, "
            "and recover impulse-response models by allpass phase removal."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def add_common(p):
        p.add_argument(
            "--config",
            default=None,
            help="key=value file supplying defaults; flags override it",
        )
        p.add_argument("--out", default="out", help="output directory")

    gen = sub.add_parser(
        "gen", formatter_class=fmt, help="write a reference excitation"
    )
    gen.add_argument("--n", type=int, default=4096, help="signal length (even)")
    gen.add_argument("--rate", type=float, default=48000.0, help="sample rate in Hz")
    gen.add_argument("--band", default="100:20000", help="band edges f_min:f_max in Hz")
    gen.add_argument("--sweep", choices=SWEEP_CHOICES, default="linear")
    gen.add_argument("--t", type=float, default=0.06, help="sweep duration in seconds")
    add_common(gen)

    sim = sub.add_parser(
        "simulate", formatter_class=fmt, help="force a seeded random system"
    )
    sim.add_argument("--n", type=int, default=4096, help="signal length (even)")
    sim.add_argument("--rate", type=float, default=48000.0, help="sample rate in Hz")
    sim.add_argument("--band", default="100:20000", help="band edges f_min:f_max in Hz")
    sim.add_argument("--sweep", choices=SWEEP_CHOICES, default="linear")
    sim.add_argument("--t", type=float, default=0.06, help="sweep duration in seconds")
    sim.add_argument("--seed", type=int, default=0, help="base seed for system and noise")
    sim.add_argument("--snr", default="inf", help="capture SNR in dB, or 'inf'")
    sim.add_argument("--stacks", type=int, default=1, help="captures to average")
    sim.add_argument(
        "--taps", type=int, default=None, help="active system taps (default: n/4)"
    )
    add_common(sim)

    def add_recover_like(p):
        p.add_argument("--capture", default=None, help="capture file (WAV or CSV)")
        p.add_argument(
            "--phase-curve",
            dest="phase_curve",
            default=None,
            help="phase curve CSV written at generation",
        )
        p.add_argument("--band", default=None, help="band edges f_min:f_max in Hz")
        p.add_argument(
            "--rate", type=float, default=None, help="sample rate (required for CSV input)"
        )
        p.add_argument(
            "--sweep",
            choices=SWEEP_CHOICES,
            default=None,
            help="regenerate the phase curve from this family instead of a file",
        )
        p.add_argument(
            "--t", type=float, default=None, help="sweep duration for regeneration"
        )
        p.add_argument(
            "--n", type=int, default=None, help="expected capture length (cross-check)"
        )
        p.add_argument("--guard-bins", dest="guard_bins", type=int, default=2)
        add_common(p)

    rec = sub.add_parser(
        "recover", formatter_class=fmt, help="recover an impulse model from a capture"
    )
    add_recover_like(rec)
    rec.add_argument(
        "--truth", default=None, help="true system file enabling the error trace"
    )

    cmp_ = sub.add_parser(
        "compare",
        formatter_class=fmt,
        help="table of allpass recovery vs naive division",
    )
    add_recover_like(cmp_)
    cmp_.add_argument("--truth", default=None, help="true system file (required)")
    cmp_.add_argument(
        "--floor",
        default="none",
        help="naive division floor: 'none' or a positive magnitude",
    )

    return parser


# -- configuration ----------------------------------------------------------


def _scan_config_path(argv) -> str | None:
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def _load_config(path: str, errors: list) -> dict:
    """Parse a key=value config file into casted parser defaults."""
    text = Path(path).read_text(encoding="utf-8")
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            errors.append(f"config line {line_no}: expected key=value, got {line!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = value
    casted = {}
    for key, value in values.items():
        caster = _CASTERS.get(key, str)
        try:
            casted[key] = caster(value)
        except ValueError:
            errors.append(
                f"config key {key!r}: cannot parse {value!r} as {caster.__name__}"
            )
    return casted


def _apply_config(parser: argparse.ArgumentParser, config: dict, errors: list) -> None:
    known = set()
    for action in parser._subparsers._group_actions:
        for sub in action.choices.values():
            dests = {a.dest for a in sub._actions}
            known.update(dests)
            sub.set_defaults(**{k: v for k, v in config.items() if k in dests})
    for key in config:
        if key not in known:
            errors.append(f"config key {key!r} matches no command-line flag")


# -- validation -------------------------------------------------------------


def _parse_band(text: str, errors: list) -> BandLimits | None:
    parts = text.split(":")
    if len(parts) != 2:
        errors.append(f"--band must be 'f_min:f_max', got {text!r}")
        return None
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        errors.append(f"--band edges must be numeric, got {text!r}")
        return None
    if not 0 <= lo < hi:
        errors.append(f"--band must satisfy 0 <= f_min < f_max, got {text!r}")
        return None
    return BandLimits(lo, hi)


def _check_band_rate(band: BandLimits, rate: float, errors: list) -> None:
    if band is not None and rate is not None and rate > 0:
        if band.f_max_hz > rate / 2.0:
            errors.append(
                f"--band f_max {band.f_max_hz:g} Hz exceeds half the sample "
                f"rate ({rate / 2.0:g} Hz)"
            )


def _parse_snr(text: str, errors: list) -> float | None:
    if text == "inf":
        return float("inf")
    try:
        return float(text)
    except ValueError:
        errors.append(f"--snr must be a dB value or 'inf', got {text!r}")
        return None


def _parse_floor(text: str, errors: list):
    if text == "none":
        return None
    try:
        value = float(text)
    except ValueError:
        errors.append(f"--floor must be 'none' or a positive number, got {text!r}")
        return None
    if value <= 0:
        errors.append(f"--floor must be positive, got {value}")
        return None
    return value


def _validate_generation(args, errors: list) -> dict:
    cfg = {}
    if args.n < 2 or args.n % 2:
        errors.append(f"--n must be even and >= 2, got {args.n}")
    if args.rate <= 0:
        errors.append(f"--rate must be positive, got {args.rate}")
    band = _parse_band(args.band, errors)
    _check_band_rate(band, args.rate, errors)
    cfg["band"] = band
    if args.sweep != "none":
        limit = args.n / args.rate if args.rate > 0 else None
        if args.t <= 0 or (limit is not None and args.t > limit):
            errors.append(
                f"--t must satisfy 0 < t <= n/rate"
                + (f" = {limit:g}" if limit else "")
                + f", got {args.t}"
            )
        if args.sweep == "exp1" and band is not None and band.f_min_hz <= 0:
            errors.append("--sweep exp1 needs --band f_min > 0")
    if args.subcommand == "simulate":
        cfg["snr"] = _parse_snr(args.snr, errors)
        if args.stacks < 1:
            errors.append(f"--stacks must be >= 1, got {args.stacks}")
        taps = args.taps if args.taps is not None else max(1, args.n // 4)
        if not 1 <= taps <= max(args.n, 1):
            errors.append(f"--taps must be in [1, {args.n}], got {taps}")
        cfg["taps"] = taps
    return cfg


def _validate_recover_like(args, errors: list) -> dict:
    cfg = {}
    if args.capture is None:
        errors.append("--capture is required")
    else:
        path = Path(args.capture)
        if not path.exists():
            errors.append(f"capture file {path} does not exist")
        elif path.suffix.lower() == ".csv" and args.rate is None:
            errors.append("--rate is required when the capture is a CSV file")
    if args.rate is not None and args.rate <= 0:
        errors.append(f"--rate must be positive, got {args.rate}")
    if args.band is None:
        errors.append("--band is required")
        cfg["band"] = None
    else:
        band = _parse_band(args.band, errors)
        _check_band_rate(band, args.rate, errors)
        cfg["band"] = band

    has_file = args.phase_curve is not None
    has_regen = args.sweep is not None or args.t is not None
    if has_file and has_regen:
        errors.append(
            "ambiguous phase source: give --phase-curve or the regeneration "
            "flags --sweep/--t, not both"
        )
    elif has_file:
        if not Path(args.phase_curve).exists():
            errors.append(f"phase curve file {args.phase_curve} does not exist")
    elif not (args.sweep is not None and args.t is not None):
        errors.append(
            "phase source missing: give --phase-curve FILE, or both --sweep "
            "and --t to regenerate it"
        )
    if args.t is not None and args.t <= 0:
        errors.append(f"--t must be positive, got {args.t}")
    if args.n is not None and (args.n < 2 or args.n % 2):
        errors.append(f"--n must be even and >= 2, got {args.n}")
    if args.guard_bins < 0:
        errors.append(f"--guard-bins must be >= 0, got {args.guard_bins}")

    if args.truth is not None:
        if not Path(args.truth).exists():
            errors.append(f"truth file {args.truth} does not exist")
    elif args.subcommand == "compare":
        errors.append("--truth is required for compare")
    if args.subcommand == "compare":
        cfg["floor"] = _parse_floor(args.floor, errors)
    return cfg


def validate(args) -> tuple[dict, list]:
    errors: list = []
    if args.subcommand in ("gen", "simulate"):
        cfg = _validate_generation(args, errors)
    else:
        cfg = _validate_recover_like(args, errors)
    return cfg, errors


# -- output staging ---------------------------------------------------------


def _commit_outputs(out_dir: Path, files: dict) -> None:
    """Write every payload to a temp file, then rename all into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, payload in files.items():
            tmp = out_dir / f".{name}.tmp"
            if isinstance(payload, bytes):
                tmp.write_bytes(payload)
            else:
                tmp.write_text(payload, encoding="utf-8")
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    except BaseException:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise


def _signal_payloads(stem: str, signal: RealSignal) -> dict:
    """CSV always; WAV too when the rate is an integer WAV can carry."""
    files = {f"{stem}.csv": signal_csv_text(signal)}
    if abs(signal.sample_rate_hz - round(signal.sample_rate_hz)) <= 1e-6:
        files[f"{stem}.wav"] = encode_wav(
            signal.samples, signal.sample_rate_hz, "wav_float32"
        )
    return files


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


# -- subcommands ------------------------------------------------------------


def _cmd_gen(args, cfg) -> int:
    band = cfg["band"]
    reference = make_reference(
        args.n, args.rate, band, SweepSpec(args.sweep, args.t)
    )
    files = _signal_payloads("reference", reference.signal)
    files["reference_spectrum.csv"] = spectrum_csv_text(dft(reference.signal))
    files["phase_curve.csv"] = phase_curve_csv_text(reference.phase, reference.scale)
    _commit_outputs(Path(args.out), files)
    peak = float(np.max(np.abs(reference.signal.samples)))
    print(
        f"gen: n={args.n} rate={args.rate:g} band={band.f_min_hz:g}:{band.f_max_hz:g} "
        f"sweep={args.sweep} t={args.t:g} peak={peak:g} scale={_fmt(reference.scale)}"
    )
    return 0


def _cmd_simulate(args, cfg) -> int:
    band = cfg["band"]
    reference = make_reference(args.n, args.rate, band, SweepSpec(args.sweep, args.t))
    system = random_fir_system(args.n, args.rate, cfg["taps"], args.seed)
    response = force_system(system, reference.signal)
    captures = simulate_captures(
        system, reference.signal, cfg["snr"], args.stacks, args.seed
    )
    capture = stack_captures(captures)

    files = _signal_payloads("system", system.taps)
    files.update(_signal_payloads("reference", reference.signal))
    files["phase_curve.csv"] = phase_curve_csv_text(reference.phase, reference.scale)
    files.update(_signal_payloads("response", response))
    files.update(_signal_payloads("capture", capture))
    _commit_outputs(Path(args.out), files)
    print(
        f"simulate: n={args.n} rate={args.rate:g} "
        f"band={band.f_min_hz:g}:{band.f_max_hz:g} sweep={args.sweep} "
        f"t={args.t:g} taps={cfg['taps']} seed={args.seed} snr={args.snr} "
        f"stacks={args.stacks}"
    )
    return 0


def _read_capture(args) -> RealSignal:
    return read_signal(SignalFile(Path(args.capture)), args.rate)


def _resolve_phase(args, cfg, capture: RealSignal):
    """Phase curve, scale, and band for a recover/compare run."""
    n, fs = capture.n, capture.sample_rate_hz
    if args.n is not None and args.n != n:
        raise ShapeMismatchError(
            f"capture has {n} samples but --n says {args.n}"
        )
    band = cfg["band"]
    band.validate_for(fs)
    if args.phase_curve is not None:
        curve, scale = read_phase_curve_csv(args.phase_curve)
        if curve.n != n:
            raise ShapeMismatchError(
                f"capture has {n} samples but phase curve has {curve.n} bins"
            )
        if curve.sample_rate_hz != fs:
            raise ShapeMismatchError(
                f"capture rate {fs} does not match phase curve rate "
                f"{curve.sample_rate_hz}"
            )
    else:
        reference = make_reference(n, fs, band, SweepSpec(args.sweep, args.t))
        curve, scale = reference.phase, reference.scale
    return curve, scale, band


def _read_truth(args, capture: RealSignal) -> RealSignal | None:
    if args.truth is None:
        return None
    rate = args.rate
    if rate is None and Path(args.truth).suffix.lower() == ".csv":
        rate = capture.sample_rate_hz
    truth = read_signal(SignalFile(Path(args.truth)), rate)
    if truth.n != capture.n or truth.sample_rate_hz != capture.sample_rate_hz:
        raise ShapeMismatchError(
            "truth file does not match the capture's length and rate"
        )
    return truth


def _error_trace_text(truth_spectrum, result) -> str:
    n, fs = truth_spectrum.n, truth_spectrum.sample_rate_hz
    mask = band_limited_impulse(n, fs, result.band)
    target = truth_spectrum.bins * mask.bins
    rows = []
    for k in range(n // 2 + 1):
        rows.append(
            [
                k,
                _fmt(k * fs / n),
                _fmt(abs(truth_spectrum.bins[k])),
                _fmt(abs(result.model_spectrum.bins[k])),
                _fmt(abs(result.model_spectrum.bins[k] - target[k])),
            ]
        )
    return _csv_text(ERROR_TRACE_HEADER, rows)


def _cmd_recover(args, cfg) -> int:
    capture = _read_capture(args)
    curve, scale, band = _resolve_phase(args, cfg, capture)
    truth = _read_truth(args, capture)
    result = recover_impulse_model(
        capture,
        curve,
        band,
        scale=scale,
        reference_system=truth,
        guard_bins=args.guard_bins,
    )
    files = _signal_payloads("model", result.model)
    files["model_spectrum.csv"] = spectrum_csv_text(result.model_spectrum)
    if truth is not None:
        files["error_trace.csv"] = _error_trace_text(dft(truth), result)
    _commit_outputs(Path(args.out), files)
    if result.in_band_error is not None:
        print(f"in_band_error = {_fmt(result.in_band_error)}")
    else:
        print(
            f"recover: n={capture.n} rate={capture.sample_rate_hz:g} "
            f"band={band.f_min_hz:g}:{band.f_max_hz:g} wrote model files"
        )
    return 0


def _cmd_compare(args, cfg) -> int:
    capture = _read_capture(args)
    curve, scale, band = _resolve_phase(args, cfg, capture)
    truth = _read_truth(args, capture)
    n, fs = capture.n, capture.sample_rate_hz

    truth_spectrum = dft(truth)
    capture_spectrum = dft(capture)
    mask = band_limited_impulse(n, fs, band)
    # Spectrum of the normalized reference as played: never read back from a
    # file, so out-of-band bins are exactly zero and the naive baseline hits
    # true empty bins.
    played = Spectrum(
        apply_allpass(mask, curve).bins / scale, fs, hermitian=True
    )
    out_of_band = mask.bins == 0
    guard = args.guard_bins

    def band_error(bins: np.ndarray) -> float:
        # np.where evaluates both branches; silence inf*0 at the empty bins.
        with np.errstate(invalid="ignore"):
            projected = np.where(out_of_band, 0.0, bins * mask.bins)
        return in_band_error(
            truth_spectrum, Spectrum(projected, fs), band, guard_bins=guard
        )

    def out_of_band_peak(bins: np.ndarray) -> float:
        if not np.any(out_of_band):
            return 0.0
        return float(np.max(np.abs(bins[out_of_band])))

    rows = []

    result = recover_impulse_model(
        capture, curve, band, scale=scale, reference_system=truth, guard_bins=guard
    )
    allpass_bins = result.model_spectrum.bins
    rows.append(
        [
            "allpass",
            _fmt(result.in_band_error),
            _fmt(out_of_band_peak(allpass_bins)),
            "true" if np.all(np.isfinite(allpass_bins)) else "false",
        ]
    )

    try:
        raw_none = naive_deconvolve(capture_spectrum, played, None).bins
    except DivisionBlowupError as blowup:
        raw_none = blowup.spectrum
    rows.append(
        [
            "naive_floor_none",
            _fmt(band_error(raw_none)),
            _fmt(out_of_band_peak(raw_none)),
            "true" if np.all(np.isfinite(raw_none)) else "false",
        ]
    )

    eps = cfg["floor"] if cfg["floor"] is not None else DEFAULT_COMPARE_FLOOR
    raw_floored = naive_deconvolve(capture_spectrum, played, eps).bins
    rows.append(
        [
            f"naive_floor_{eps!r}",
            _fmt(band_error(raw_floored)),
            _fmt(out_of_band_peak(raw_floored)),
            "true" if np.all(np.isfinite(raw_floored)) else "false",
        ]
    )

    text = _csv_text(COMPARE_HEADER, rows)
    _commit_outputs(Path(args.out), {"compare.csv": text})
    sys.stdout.write(text)
    return 0


# -- entry points -----------------------------------------------------------


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()

    errors: list = []
    config_path = _scan_config_path(argv)
    if config_path is not None:
        try:
            config = _load_config(config_path, errors)
        except FileNotFoundError:
            print(f"error: config file {config_path} does not exist", file=sys.stderr)
            return 2
        _apply_config(parser, config, errors)
    if errors:
        for message in errors:
            print(f"error: {message}", file=sys.stderr)
        return 2

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    cfg, errors = validate(args)
    if errors:
        for message in errors:
            print(f"error: {message}", file=sys.stderr)
        return 2

    handler = {
        "gen": _cmd_gen,
        "simulate": _cmd_simulate,
        "recover": _cmd_recover,
        "compare": _cmd_compare,
    }[args.subcommand]
    try:
        return handler(args, cfg)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChirpIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
