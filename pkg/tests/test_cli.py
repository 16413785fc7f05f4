"""Command-line pipeline, run in-process through ``chirpid.cli.main``."""

import csv
import io

import numpy as np
import pytest

from chirpid import (
    BandLimits,
    SweepSpec,
    make_reference,
    parse_phase_curve_csv,
    parse_signal_csv,
    time_domain_impulse,
)
from chirpid.cli import main


def _read_csv_signal(path, rate):
    return parse_signal_csv(path.read_text(), rate).samples


def _rows(path):
    return list(csv.reader(io.StringIO(path.read_text())))


class TestGen:
    def test_writes_reference_files(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            [
                "gen",
                "--n", "512",
                "--rate", "8000",
                "--band", "200:3000",
                "--sweep", "linear",
                "--t", "0.05",
                "--out", str(out),
            ]
        )
        assert code == 0
        for name in (
            "reference.csv",
            "reference.wav",
            "reference_spectrum.csv",
            "phase_curve.csv",
        ):
            assert (out / name).exists()
        samples = _read_csv_signal(out / "reference.csv", 8000.0)
        assert samples.shape == (512,)
        assert np.max(np.abs(samples)) == pytest.approx(1.0)
        curve, scale = parse_phase_curve_csv((out / "phase_curve.csv").read_text())
        assert curve.n == 512
        assert curve.sample_rate_hz == 8000.0
        assert scale > 0.0
        assert "peak=1" in capsys.readouterr().out

    def test_matches_library_construction(self, tmp_path):
        out = tmp_path / "out"
        main(
            ["gen", "--n", "512", "--rate", "8000", "--band", "200:3000",
             "--sweep", "linear", "--t", "0.05", "--out", str(out)]
        )
        reference = make_reference(
            512, 8000.0, BandLimits(200.0, 3000.0), SweepSpec("linear", 0.05)
        )
        samples = _read_csv_signal(out / "reference.csv", 8000.0)
        np.testing.assert_array_equal(samples, reference.signal.samples)

    def test_sweep_none_writes_the_impulse(self, tmp_path):
        out = tmp_path / "out"
        code = main(
            ["gen", "--n", "512", "--rate", "8000", "--band", "200:3000",
             "--sweep", "none", "--out", str(out)]
        )
        assert code == 0
        samples = _read_csv_signal(out / "reference.csv", 8000.0)
        impulse = time_domain_impulse(512, 8000.0, BandLimits(200.0, 3000.0))
        scale = float(np.max(np.abs(impulse.samples)))
        np.testing.assert_allclose(
            samples, impulse.samples / scale, rtol=0, atol=1e-15
        )

    def test_runs_are_byte_identical(self, tmp_path):
        args = ["gen", "--n", "512", "--rate", "8000", "--band", "200:3000",
                "--sweep", "linear", "--t", "0.05"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        for child in sorted(a.iterdir()):
            assert child.read_bytes() == (b / child.name).read_bytes()

    def test_band_past_nyquist_fails_naming_the_limit(self, tmp_path, capsys):
        code = main(
            ["gen", "--band", "30000:40000", "--rate", "48000",
             "--out", str(tmp_path / "out")]
        )
        assert code == 2
        err = capsys.readouterr().err
        assert "24000" in err
        assert not (tmp_path / "out").exists()

    def test_multiple_errors_reported_together(self, tmp_path, capsys):
        code = main(
            ["simulate", "--n", "7", "--rate", "-1", "--band", "5:x",
             "--stacks", "0", "--out", str(tmp_path / "out")]
        )
        assert code == 2
        err = capsys.readouterr().err
        assert "--n must be even" in err
        assert "--rate must be positive" in err
        assert "--band edges must be numeric" in err
        assert "--stacks must be >= 1" in err


class TestSimulate:
    ARGS = ["simulate", "--n", "512", "--rate", "8000", "--band", "200:3000",
            "--sweep", "linear", "--t", "0.05", "--seed", "5"]

    def test_noiseless_capture_equals_response(self, tmp_path):
        out = tmp_path / "out"
        code = main(self.ARGS + ["--snr", "inf", "--out", str(out)])
        assert code == 0
        assert (out / "capture.csv").read_bytes() == (
            out / "response.csv"
        ).read_bytes()
        assert (out / "system.csv").exists()

    def test_stacking_reduces_noise(self, tmp_path):
        single, stacked = tmp_path / "m1", tmp_path / "m16"
        main(self.ARGS + ["--snr", "20", "--stacks", "1", "--out", str(single)])
        main(self.ARGS + ["--snr", "20", "--stacks", "16", "--out", str(stacked)])
        clean = _read_csv_signal(single / "response.csv", 8000.0)
        e1 = np.sum((_read_csv_signal(single / "capture.csv", 8000.0) - clean) ** 2)
        e16 = np.sum((_read_csv_signal(stacked / "capture.csv", 8000.0) - clean) ** 2)
        assert e16 < e1

    def test_seed_controls_noise(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(self.ARGS + ["--snr", "20", "--out", str(a)])
        main(["simulate", "--n", "512", "--rate", "8000", "--band", "200:3000",
              "--sweep", "linear", "--t", "0.05", "--seed", "6",
              "--snr", "20", "--out", str(b)])
        assert (a / "capture.csv").read_bytes() != (b / "capture.csv").read_bytes()


class TestRecover:
    def _simulated(self, tmp_path, extra=()):
        out = tmp_path / "sim"
        code = main(
            ["simulate", "--n", "512", "--rate", "8000", "--band", "200:3000",
             "--sweep", "linear", "--t", "0.05", "--seed", "5", *extra,
             "--out", str(out)]
        )
        assert code == 0
        return out

    def _scalar_error(self, capsys):
        out = capsys.readouterr().out
        assert "in_band_error = " in out
        return float(out.strip().rsplit(" ", 1)[-1])

    def test_noiseless_round_trip_with_phase_file(self, tmp_path, capsys):
        sim = self._simulated(tmp_path)
        out = tmp_path / "rec"
        code = main(
            ["recover", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--phase-curve", str(sim / "phase_curve.csv"),
             "--truth", str(sim / "system.csv"), "--out", str(out)]
        )
        assert code == 0
        assert self._scalar_error(capsys) < 1e-9
        for name in ("model.csv", "model.wav", "model_spectrum.csv",
                     "error_trace.csv"):
            assert (out / name).exists()

    def test_noiseless_round_trip_with_regeneration(self, tmp_path, capsys):
        sim = self._simulated(tmp_path)
        out = tmp_path / "rec"
        code = main(
            ["recover", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--sweep", "linear", "--t", "0.05",
             "--truth", str(sim / "system.csv"), "--out", str(out)]
        )
        assert code == 0
        assert self._scalar_error(capsys) < 1e-9

    def test_error_trace_has_expected_columns(self, tmp_path):
        sim = self._simulated(tmp_path)
        out = tmp_path / "rec"
        main(
            ["recover", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--phase-curve", str(sim / "phase_curve.csv"),
             "--truth", str(sim / "system.csv"), "--out", str(out)]
        )
        rows = _rows(out / "error_trace.csv")
        assert rows[0] == ["bin", "freq_hz", "system_magnitude",
                           "model_magnitude", "error_magnitude"]
        assert len(rows) == 1 + 257  # bins 0..256

    def test_wrong_length_phase_curve_fails(self, tmp_path, capsys):
        sim = self._simulated(tmp_path)
        other = tmp_path / "other"
        main(["gen", "--n", "256", "--rate", "8000", "--band", "200:3000",
              "--sweep", "linear", "--t", "0.02", "--out", str(other)])
        code = main(
            ["recover", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--phase-curve", str(other / "phase_curve.csv"),
             "--out", str(tmp_path / "rec")]
        )
        assert code == 2
        assert "phase curve has 256 bins" in capsys.readouterr().err

    def test_phase_source_ambiguity_fails(self, tmp_path, capsys):
        sim = self._simulated(tmp_path)
        code = main(
            ["recover", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--phase-curve", str(sim / "phase_curve.csv"),
             "--sweep", "linear", "--t", "0.05", "--out", str(tmp_path / "rec")]
        )
        assert code == 2
        assert "ambiguous phase source" in capsys.readouterr().err

    def test_missing_phase_source_fails(self, tmp_path, capsys):
        sim = self._simulated(tmp_path)
        code = main(
            ["recover", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--out", str(tmp_path / "rec")]
        )
        assert code == 2
        assert "phase source missing" in capsys.readouterr().err

    def test_missing_capture_file_fails(self, tmp_path, capsys):
        code = main(
            ["recover", "--capture", str(tmp_path / "nope.csv"), "--rate", "8000",
             "--band", "200:3000", "--sweep", "linear", "--t", "0.05",
             "--out", str(tmp_path / "rec")]
        )
        assert code == 2
        assert "does not exist" in capsys.readouterr().err


class TestCompare:
    def _simulated(self, tmp_path, band="200:3000", snr="inf"):
        out = tmp_path / "sim"
        main(["simulate", "--n", "512", "--rate", "8000", "--band", band,
              "--sweep", "linear", "--t", "0.05", "--seed", "5",
              "--snr", snr, "--out", str(out)])
        return out

    def _table(self, path):
        rows = _rows(path)
        assert rows[0] == ["method", "in_band_error",
                           "max_out_of_band_magnitude", "finite_output"]
        return {row[0]: row[1:] for row in rows[1:]}

    def test_naive_division_blows_up_where_allpass_does_not(self, tmp_path):
        sim = self._simulated(tmp_path)
        out = tmp_path / "cmp"
        code = main(
            ["compare", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--phase-curve", str(sim / "phase_curve.csv"),
             "--truth", str(sim / "system.csv"), "--out", str(out)]
        )
        assert code == 0
        table = self._table(out / "compare.csv")
        assert table["allpass"][2] == "true"
        assert table["naive_floor_none"][2] == "false"
        assert table["naive_floor_1e-12"][2] == "true"
        assert float(table["allpass"][0]) < 1e-9
        # Division by the floor amplifies out-of-band numerical dust by
        # orders of magnitude; phase removal leaves it at the noise floor.
        assert float(table["allpass"][1]) < 1e-9
        assert float(table["naive_floor_1e-12"][1]) > 1e6 * float(
            table["allpass"][1]
        )

    def test_full_band_noiseless_methods_agree(self, tmp_path):
        sim = self._simulated(tmp_path, band="0:4000")
        out = tmp_path / "cmp"
        code = main(
            ["compare", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "0:4000", "--phase-curve", str(sim / "phase_curve.csv"),
             "--truth", str(sim / "system.csv"), "--out", str(out)]
        )
        assert code == 0
        table = self._table(out / "compare.csv")
        for method, row in table.items():
            assert float(row[0]) < 1e-9, method
            assert row[2] == "true", method

    def test_noisy_in_band_errors_agree_between_methods(self, tmp_path):
        # In band, dividing by the reference and removing its phase are the
        # same operation, so their noisy errors match almost exactly.
        sim = self._simulated(tmp_path, snr="20")
        out = tmp_path / "cmp"
        main(["compare", "--capture", str(sim / "capture.csv"), "--rate", "8000",
              "--band", "200:3000", "--phase-curve", str(sim / "phase_curve.csv"),
              "--truth", str(sim / "system.csv"), "--out", str(out)])
        table = self._table(out / "compare.csv")
        allpass = float(table["allpass"][0])
        naive = float(table["naive_floor_none"][0])
        assert allpass > 1e-6  # the noise is actually visible
        assert naive == pytest.approx(allpass, rel=1e-6)

    def test_truth_is_required(self, tmp_path, capsys):
        sim = self._simulated(tmp_path)
        code = main(
            ["compare", "--capture", str(sim / "capture.csv"), "--rate", "8000",
             "--band", "200:3000", "--phase-curve", str(sim / "phase_curve.csv"),
             "--out", str(tmp_path / "cmp")]
        )
        assert code == 2
        assert "--truth is required" in capsys.readouterr().err


class TestConfig:
    def test_config_supplies_defaults_flags_override(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("n = 512\nrate = 16000\nband = 200:3000\nt = 0.02\n")
        out = tmp_path / "out"
        code = main(
            ["gen", "--config", str(config), "--rate", "8000", "--out", str(out)]
        )
        assert code == 0
        curve, _ = parse_phase_curve_csv((out / "phase_curve.csv").read_text())
        assert curve.n == 512  # from the config file
        assert curve.sample_rate_hz == 8000.0  # flag beats config

    def test_unknown_config_key_fails(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("n = 512\nbogus = 3\n")
        code = main(["gen", "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "bogus" in capsys.readouterr().err

    def test_missing_config_file_fails(self, tmp_path, capsys):
        code = main(
            ["gen", "--config", str(tmp_path / "nope.cfg"),
             "--out", str(tmp_path / "o")]
        )
        assert code == 2
        assert "does not exist" in capsys.readouterr().err

    def test_malformed_config_line_fails(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("n 512\n")
        code = main(["gen", "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "expected key=value" in capsys.readouterr().err


class TestUsage:
    def test_no_subcommand_is_usage_error(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "gen" in capsys.readouterr().out
