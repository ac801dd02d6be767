"""Readers for the simulator's documented file formats.

The only coupling to the simulation package is through these schemas:

  diagnostics CSV: t,rho_l2,rho_x_l2,theta_l2,theta_x_l2,theta_linf,
                   rho_t_l2,theta_t_l2,orbital_dist,gamma,energy,energy_drift
  snapshot CSV:    x,re_u,im_u,re_ut,im_ut   (one file per time)
  metadata JSON:   sidecar with wave parameters and the snapshot file list
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

DIAGNOSTICS_COLUMNS = (
    "t", "rho_l2", "rho_x_l2", "theta_l2", "theta_x_l2", "theta_linf",
    "rho_t_l2", "theta_t_l2", "orbital_dist", "gamma", "energy", "energy_drift",
)
SNAPSHOT_COLUMNS = ("x", "re_u", "im_u", "re_ut", "im_ut")


class SchemaMismatch(Exception):
    """Input file does not match the documented schema."""


def _read_csv(path: Path, expected: tuple[str, ...]) -> dict[str, np.ndarray]:
    if not path.exists():
        raise FileNotFoundError(path)
    lines = path.read_text().strip().splitlines()
    if not lines:
        raise SchemaMismatch(f"{path}: empty file")
    names = tuple(lines[0].split(","))
    if names != expected:
        missing = set(expected) - set(names)
        offender = sorted(missing)[0] if missing else lines[0]
        raise SchemaMismatch(f"{path}: header mismatch (missing/unexpected "
                             f"column {offender!r})")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(names):
            raise SchemaMismatch(f"{path}:{lineno}: expected {len(names)} fields")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise SchemaMismatch(f"{path}:{lineno}: {exc}") from exc
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        raise SchemaMismatch(f"{path}: no data rows")
    return {name: data[:, i] for i, name in enumerate(names)}


def read_diagnostics(path: str | Path) -> dict[str, np.ndarray]:
    return _read_csv(Path(path), DIAGNOSTICS_COLUMNS)


def read_snapshot(path: str | Path) -> dict[str, np.ndarray]:
    return _read_csv(Path(path), SNAPSHOT_COLUMNS)


def read_metadata(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    try:
        meta = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: {exc}") from exc
    for key in ("wave", "snapshots"):
        if key not in meta:
            raise SchemaMismatch(f"{path}: missing {key!r} entry")
    return meta
