"""Config parsing, subcommand behavior, CSV schemas, and exit codes."""

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import kgplane as kg
from kgplane.cli import (DIAGNOSTICS_HEADER, SNAPSHOT_HEADER, SPECTRUM_HEADER,
                         main, parse_config, read_diagnostics_csv)

SMALL_CONFIG = """\
[grid]
length = 20.0
n = 256

[solver]
dt = 1e-3
t_end = 0.1
sample_every = 10
"""

UNSTABLE_CONFIG = """\
[nonlinearity]
coeffs = 1, -1

[wave]
k = 0.9424777960769379   # 2 pi * 3 / 20
a = 0.5
close = omega

[grid]
length = 20.0
n = 256

[solver]
dt = 1e-3
t_end = 0.05
sample_every = 10
"""


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "kgplane", *args],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


class TestConfigParsing:
    def test_defaults_reproduce_reference(self, reference):
        config = parse_config("")
        assert config.pw == reference["pw"]
        assert config.f == reference["f"]
        assert config.grid.n == 2048
        assert config.split.dt == 2e-4
        assert config.pert.w0_amp == 4 + 4j

    def test_round_trip_equality(self):
        config = parse_config(SMALL_CONFIG)
        again = parse_config(SMALL_CONFIG)
        assert config == again

    def test_unknown_key_has_line_number(self):
        text = "[grid]\nlength = 20.0\nwat = 3\n"
        with pytest.raises(kg.ConfigError, match="line 3"):
            parse_config(text)

    def test_unknown_section(self):
        with pytest.raises(kg.ConfigError, match="unknown section"):
            parse_config("[mystery]\nx = 1\n")

    def test_bad_value_has_line_number(self):
        with pytest.raises(kg.ConfigError, match="line 2"):
            parse_config("[grid]\nn = not_a_number\n")

    def test_negative_amplitude_names_field(self):
        text = "[wave]\na = -1.0\nclose = omega\n"
        with pytest.raises(kg.ConfigError, match="amplitude"):
            parse_config(text)

    def test_incommensurate_wave_number_rejected(self):
        text = "[wave]\nk = 1.0\nomega = 10.0\n"
        with pytest.raises(kg.ConfigError, match="periodic"):
            parse_config(text)

    def test_close_none_checks_dispersion(self):
        good = ("[wave]\nclose = none\na = {a!r}\nk = {k!r}\nomega = 10.0\n"
                .format(a=math.sqrt(99 - 4 * math.pi**2), k=2 * math.pi))
        parse_config(good)
        bad = good.replace("omega = 10.0", "omega = 9.0")
        with pytest.raises(kg.ConfigError, match="dispersion"):
            parse_config(bad)

    def test_solver_guards(self):
        with pytest.raises(kg.ConfigError, match="dt"):
            parse_config("[solver]\ndt = 0.5\n")


class TestClassifyCommand:
    def test_reference_stable_exit_zero(self, capsys):
        assert main(["classify"]) == 0
        out = capsys.readouterr().out
        assert "stable" in out
        assert "agreement: yes" in out
        assert "positive_mass" in out

    def test_unstable_config_exit_zero(self, tmp_path, capsys):
        cfg = tmp_path / "unstable.cfg"
        cfg.write_text(UNSTABLE_CONFIG)
        assert main(["classify", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "unstable" in out
        assert "agreement: yes" in out

    def test_config_error_exit_64(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[wave]\na = -2.0\nclose = omega\n")
        assert main(["classify", "--config", str(cfg)]) == 64


class TestSimulateCommand:
    def test_small_run_schema_and_monotone_time(self, tmp_path):
        cfg = tmp_path / "small.cfg"
        cfg.write_text(SMALL_CONFIG)
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        csv_path = out / "diagnostics.csv"
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == DIAGNOSTICS_HEADER
        cols = read_diagnostics_csv(csv_path)
        t = cols["t"]
        assert all(b > a for a, b in zip(t, t[1:]))
        assert len(t) == 11

    def test_zero_perturbation_columns_vanish(self, tmp_path):
        cfg = tmp_path / "null.cfg"
        cfg.write_text(SMALL_CONFIG + "\n[perturbation]\nw0 = 0\nv0 = 0\n")
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        cols = read_diagnostics_csv(out / "diagnostics.csv")
        for name in ("rho_l2", "rho_x_l2", "theta_l2", "theta_x_l2",
                     "theta_linf", "rho_t_l2", "theta_t_l2", "orbital_dist",
                     "energy_drift"):
            assert max(abs(v) for v in cols[name]) <= 1e-9, name

    def test_determinism_byte_identical(self, tmp_path):
        cfg = tmp_path / "small.cfg"
        cfg.write_text(SMALL_CONFIG)
        outputs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
            outputs.append((out / "diagnostics.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_snapshots_and_sidecar(self, tmp_path):
        cfg = tmp_path / "small.cfg"
        cfg.write_text(SMALL_CONFIG)
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--snapshot-times", "0,0.05,0.1", "--threads", "1"]) == 0
        snaps = sorted(p.name for p in out.glob("snapshot_*.csv"))
        assert snaps == ["snapshot_t0.0.csv", "snapshot_t0.05.csv",
                         "snapshot_t0.1.csv"]
        first = (out / "snapshot_t0.0.csv").read_text().splitlines()
        assert first[0] == SNAPSHOT_HEADER
        assert len(first) == 257
        meta = json.loads((out / "diagnostics.csv.meta.json").read_text())
        assert meta["threads"] == 1
        assert meta["snapshots"] == snaps
        # Config echoed in the sidecar re-parses to an equal RunConfig.
        assert parse_config(meta["config_text"]) == parse_config(SMALL_CONFIG)

    def test_unstable_requires_force(self, tmp_path, capsys):
        cfg = tmp_path / "unstable.cfg"
        cfg.write_text(UNSTABLE_CONFIG)
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 64
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--force"]) == 0
        cols = read_diagnostics_csv(out / "diagnostics.csv")
        assert len(cols["t"]) > 1

    def test_blowup_aborts_with_partial_csv(self, tmp_path, capsys):
        # Huge negative split mass trips the cosh overflow guard on the first
        # step; the t = 0 row must already be on disk.
        cfg = tmp_path / "blowup.cfg"
        cfg.write_text("[grid]\nlength = 20.0\nn = 256\n"
                       "[solver]\ndt = 0.01\nt_end = 0.1\nsample_every = 10\n"
                       "mass = -1e8\n")
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 1
        err = capsys.readouterr().err
        assert "aborted" in err
        cols = read_diagnostics_csv(out / "diagnostics.csv")
        assert len(cols["t"]) == 1
        meta = json.loads((out / "diagnostics.csv.meta.json").read_text())
        assert "aborted" in meta


class TestSpectrumCommand:
    def test_reference_spectrum_csv(self, tmp_path, capsys):
        cfg = tmp_path / "cfg"
        cfg.write_text("[spectral]\nn_samples = 96\n")
        out = tmp_path / "run"
        assert main(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "verdict: stable" in printed
        lines = (out / "spectrum.csv").read_text().strip().splitlines()
        assert lines[0] == SPECTRUM_HEADER
        data = np.array([[float(v) for v in line.split(",")]
                         for line in lines[1:]])
        # stable reference scan: all real parts at solver-noise level
        assert np.max(np.abs(data[:, 1:5])) <= 1e-8


class TestFitCommand:
    def test_synthetic_power_law(self, tmp_path, capsys):
        t = np.linspace(0.0, 10.0, 101)
        rows = [DIAGNOSTICS_HEADER]
        for ti in t:
            v = 3.0 * ti**0.5 if ti > 0 else 0.0
            rows.append(",".join(repr(float(x)) for x in
                                 [ti, 0, 0, v, 0, 0, 0, 0, 0, 0, 0, 0]))
        csv_path = tmp_path / "diag.csv"
        csv_path.write_text("\n".join(rows) + "\n")
        assert main(["fit", "--csv", str(csv_path), "--column", "theta_l2",
                     "--window", "0.25"]) == 0
        out = capsys.readouterr().out
        slope = float(out.splitlines()[0].split("=")[1])
        assert slope == pytest.approx(0.5, abs=1e-12)

    def test_missing_file_exit_66(self, tmp_path):
        assert main(["fit", "--csv", str(tmp_path / "nope.csv")]) == 66

    def test_malformed_csv_exit_65(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,stuff\n1,2\n")
        assert main(["fit", "--csv", str(bad)]) == 65

    def test_missing_column_exit_65(self, tmp_path):
        path = tmp_path / "diag.csv"
        path.write_text(DIAGNOSTICS_HEADER + "\n" +
                        ",".join(["0.0"] * 12) + "\n")
        assert main(["fit", "--csv", str(path), "--column", "nope"]) == 65


class TestEnergyCommand:
    def test_unperturbed_snapshot_zero_energy(self, tmp_path, capsys):
        cfg = tmp_path / "null.cfg"
        cfg.write_text(SMALL_CONFIG + "\n[perturbation]\nw0 = 0\nv0 = 0\n")
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--snapshot-times", "0"]) == 0
        capsys.readouterr()
        assert main(["energy", "--config", str(cfg), "--snapshot",
                     str(out / "snapshot_t0.0.csv")]) == 0
        printed = capsys.readouterr().out
        total = float([ln for ln in printed.splitlines()
                       if ln.startswith("total")][0].split("=")[1])
        assert abs(total) <= 1e-10

    def test_time_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "small.cfg"
        cfg.write_text(SMALL_CONFIG)
        out = tmp_path / "run"
        main(["simulate", "--config", str(cfg), "--out", str(out),
              "--snapshot-times", "0.1"])
        capsys.readouterr()
        assert main(["energy", "--config", str(cfg), "--snapshot",
                     str(out / "snapshot_t0.1.csv"), "--time", "0.1"]) == 0

    def test_missing_snapshot_exit_66(self, tmp_path):
        assert main(["energy", "--snapshot", str(tmp_path / "nope.csv"),
                     "--time", "0"]) == 66


class TestCliProcess:
    def test_module_entry_point(self):
        code, out, err = run_cli(["classify"])
        assert code == 0
        assert "agreement: yes" in out
