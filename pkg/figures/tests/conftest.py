"""Generates a reference simulation run through the simulator's CLI; the
figure package consumes only the files it writes."""

import subprocess
import sys
from pathlib import Path

import pytest

SNAPSHOT_TIMES = (0.0, 1.0, 2.0, 4.0)


@pytest.fixture(scope="session")
def reference_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("refrun")
    times = ",".join(str(t) for t in SNAPSHOT_TIMES)
    proc = subprocess.run(
        [sys.executable, "-m", "kgplane", "simulate", "--out", str(out),
         "--snapshot-times", times],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return {
        "dir": out,
        "diagnostics": out / "diagnostics.csv",
        "meta": out / "diagnostics.csv.meta.json",
        "snapshots": [out / f"snapshot_t{t!r}.csv" for t in SNAPSHOT_TIMES],
        "times": SNAPSHOT_TIMES,
    }


def cli_fit_slope(csv_path: Path) -> float:
    proc = subprocess.run(
        [sys.executable, "-m", "kgplane", "fit", "--csv", str(csv_path),
         "--column", "theta_l2", "--window", "0.25"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    line = [ln for ln in proc.stdout.splitlines() if ln.startswith("slope")][0]
    return float(line.split("=")[1])
