"""Command-line front end: configuration parsing, experiment orchestration,
and CSV emission.

Config files are plain-text `key = value` entries under `[section]` headers
(full schema in the README); every value is optional and the defaults
reproduce the reference experiment (defocusing cubic, omega = 10, k = 2 pi,
Gaussian perturbations on a 20-unit periodic domain).

Exit codes: 0 success/agreement, 2 marginal or disagreeing verdict,
1 internal error, 64 configuration error, 65 malformed data file,
66 missing input file.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .energy import energy_of_state, select_c
from .errors import (ConditionViolated, ConfigError, KgplaneError, NonFinite,
                     SchemaMismatch)
from .field import PeriodicGrid, State, wave_mode_index
from .model import (Nonlinearity, PhaseModulation, PlaneWave,
                    amplitude_from_dispersion, close_dispersion, regime,
                    spectral_condition)
from .polar import loglog_fit
from .solver import Perturbation, SplitConfig, simulate
from .spectral import (MARGINAL, UNSTABLE, classify_closed_form,
                       ddelta0_closed_form, scan)

DIAGNOSTICS_HEADER = ("t,rho_l2,rho_x_l2,theta_l2,theta_x_l2,theta_linf,"
                      "rho_t_l2,theta_t_l2,orbital_dist,gamma,energy,energy_drift")
SNAPSHOT_HEADER = "x,re_u,im_u,re_ut,im_ut"
SPECTRUM_HEADER = ("ell,re_lambda_1,re_lambda_2,re_lambda_3,re_lambda_4,"
                   "im_lambda_1,im_lambda_2,im_lambda_3,im_lambda_4,discriminant")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_MARGINAL = 2
EXIT_CONFIG = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66

_KNOWN_KEYS = {
    "nonlinearity": {"coeffs"},
    "wave": {"a", "k", "omega", "close"},
    "modulation": {"kind", "x_minus", "x_plus", "front_k", "epsilon"},
    "perturbation": {"w0", "v0", "width", "center"},
    "grid": {"length", "n"},
    "solver": {"dt", "t_end", "sample_every", "mass", "delta2"},
    "spectral": {"ell_max", "n_samples"},
    "window": {"center", "radius"},
    "output": {"diagnostics", "spectrum"},
}


@dataclass(frozen=True)
class _Entry:
    value: str
    line: int


def _parse_entries(text: str) -> dict[str, dict[str, _Entry]]:
    """Line-oriented `[section]` / `key = value` parser with # comments."""
    entries: dict[str, dict[str, _Entry]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _KNOWN_KEYS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            entries.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: entry before any [section] header")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        if key in entries[section]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in [{section}]")
        entries[section][key] = _Entry(value=value, line=lineno)
    return entries


class _Reader:
    def __init__(self, entries):
        self.entries = entries

    def get(self, section, key, default, conv):
        entry = self.entries.get(section, {}).get(key)
        if entry is None:
            return default
        try:
            return conv(entry.value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(
                f"line {entry.line}: [{section}] {key} = {entry.value!r}: {exc}"
            ) from exc

    def has(self, section, key):
        return key in self.entries.get(section, {})

    def line_of(self, section, key):
        entry = self.entries.get(section, {}).get(key)
        return entry.line if entry else None


def _parse_complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("i", "j"))


def _parse_coeffs(s: str) -> tuple[float, ...]:
    return tuple(float(part) for part in s.replace(",", " ").split())


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run parameters (defaults = reference experiment)."""

    f: Nonlinearity
    pw: PlaneWave
    pm: PhaseModulation
    pert: Perturbation
    grid: PeriodicGrid
    split: SplitConfig
    delta2: float
    ell_max: float
    n_samples: int
    window_center: float
    window_radius: float
    diagnostics_name: str
    spectrum_name: str
    raw_text: str = field(compare=False, repr=False, default="")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config, raising ConfigError with line numbers."""
    reader = _Reader(_parse_entries(text))
    get = reader.get

    f = Nonlinearity(get("nonlinearity", "coeffs", (1.0, 1.0), _parse_coeffs))

    k = get("wave", "k", 2.0 * math.pi, float)
    close = get("wave", "close", None, str)
    if close is None:
        close = "omega" if (reader.has("wave", "a") and
                            not reader.has("wave", "omega")) else "amplitude"
    try:
        if close == "amplitude":
            omega = get("wave", "omega", 10.0, float)
            pw = amplitude_from_dispersion(k=k, omega=omega, f=f)
        elif close == "omega":
            if not reader.has("wave", "a"):
                raise ConfigError("[wave] close = omega requires an amplitude a")
            a = get("wave", "a", None, float)
            pw = close_dispersion(a=a, k=k, f=f)
        elif close == "none":
            a = get("wave", "a", None, float)
            omega = get("wave", "omega", None, float)
            if a is None or omega is None:
                raise ConfigError("[wave] close = none requires a, k, and omega")
            pw = PlaneWave(a=a, k=k, omega=omega)
            if pw.dispersion_residual(f) > 1e-12:
                raise ConfigError(
                    f"[wave] parameters violate the dispersion relation "
                    f"(residual {pw.dispersion_residual(f):.3e} > 1e-12)"
                )
        else:
            raise ConfigError(
                f"line {reader.line_of('wave', 'close')}: [wave] close must be "
                f"amplitude, omega, or none, got {close!r}"
            )
    except (KgplaneError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[wave]: {exc}") from exc

    kind = get("modulation", "kind", "zero", str)
    try:
        if kind == "zero":
            pm = PhaseModulation.zero()
        elif kind == "tanh_front":
            pm = PhaseModulation.tanh_front(
                x_minus=get("modulation", "x_minus", 0.0, float),
                x_plus=get("modulation", "x_plus", 0.0, float),
                k=get("modulation", "front_k", pw.k, float),
            )
        elif kind == "algebraic":
            pm = PhaseModulation.algebraic(get("modulation", "epsilon", 0.5, float))
        else:
            raise ConfigError(
                f"line {reader.line_of('modulation', 'kind')}: unknown "
                f"modulation kind {kind!r}"
            )
    except ValueError as exc:
        raise ConfigError(f"[modulation]: {exc}") from exc

    pert = Perturbation(
        w0_amp=get("perturbation", "w0", 4 + 4j, _parse_complex),
        v0_amp=get("perturbation", "v0", 40 + 40j, _parse_complex),
        width=get("perturbation", "width", 25.0, float),
        center=get("perturbation", "center", 10.0, float),
    )
    try:
        grid = PeriodicGrid(length=get("grid", "length", 20.0, float),
                            n=get("grid", "n", 2048, int))
        wave_mode_index(grid, pw.k)
        split = SplitConfig(
            dt=get("solver", "dt", 2e-4, float),
            mass=get("solver", "mass", f(pw.a * pw.a), float),
            t_end=get("solver", "t_end", 4.0, float),
            sample_every=get("solver", "sample_every", 50, int),
        )
    except (KgplaneError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    delta2 = get("solver", "delta2", 0.05, float)
    if not 0.0 < delta2 < 1.0:
        raise ConfigError(f"[solver] delta2 must lie in (0, 1), got {delta2}")
    if not pert.width > 0:
        raise ConfigError(f"[perturbation] width must be positive, got {pert.width}")
    if not 0.0 <= pert.center < grid.length:
        raise ConfigError(
            f"[perturbation] center {pert.center} outside [0, {grid.length})"
        )
    ell_max = get("spectral", "ell_max", 4.0 * abs(pw.k) if pw.k != 0.0 else 8.0,
                  float)
    n_samples = get("spectral", "n_samples", 512, int)
    if not ell_max > 0:
        raise ConfigError(f"[spectral] ell_max must be positive, got {ell_max}")
    if n_samples < 64:
        raise ConfigError(f"[spectral] n_samples must be >= 64, got {n_samples}")
    window_center = get("window", "center", 10.0, float)
    window_radius = get("window", "radius", 5.0, float)
    if not 0.0 <= window_center < grid.length:
        raise ConfigError(
            f"[window] center {window_center} outside [0, {grid.length})"
        )
    if not 0.0 < window_radius <= grid.length / 2.0:
        raise ConfigError(
            f"[window] radius must lie in (0, L/2], got {window_radius}"
        )
    return RunConfig(
        f=f, pw=pw, pm=pm, pert=pert, grid=grid, split=split, delta2=delta2,
        ell_max=ell_max, n_samples=n_samples, window_center=window_center,
        window_radius=window_radius,
        diagnostics_name=get("output", "diagnostics", "diagnostics.csv", str),
        spectrum_name=get("output", "spectrum", "spectrum.csv", str),
        raw_text=text,
    )


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return parse_config("")
    return parse_config(Path(path).read_text())


def _fmt(x: float) -> str:
    """Round-trip decimal representation."""
    return repr(float(x))


def _classify(config: RunConfig):
    closed = classify_closed_form(config.pw, config.f)
    samples, verdict = scan(config.pw, config.f, c=0.0, ell_max=config.ell_max,
                            n_samples=config.n_samples)
    return closed, samples, verdict


def cmd_classify(args) -> int:
    config = load_config(args.config)
    pw, f = config.pw, config.f
    closed, samples, verdict = _classify(config)
    cond = spectral_condition(pw, f)
    gmax = max(s.max_re for s in samples)
    print(f"wave: a = {_fmt(pw.a)}  a^2 = {_fmt(pw.a**2)}  k = {_fmt(pw.k)}  "
          f"omega = {_fmt(pw.omega)}")
    print(f"dispersion residual: {pw.dispersion_residual(f):.3e}")
    print(f"regime: {regime(pw, f)}")
    print(f"spectral condition: {'satisfied' if cond.satisfied else 'not satisfied'}"
          f" (margin = {_fmt(cond.margin)})")
    print(f"closed form: {closed if closed is not None else 'unclassified'}")
    witness = (f" at ell = {_fmt(verdict.witness_ell)}"
               if verdict.witness_ell is not None else "")
    print(f"scan: {verdict.verdict} (max Re lambda = {gmax:.6e}{witness})")
    print(f"discriminant curvature at ell = 0: {_fmt(ddelta0_closed_form(pw, f))}")
    print(f"agreement: {'yes' if verdict.closed_form_agrees else 'no'}")
    if verdict.verdict == MARGINAL or not verdict.closed_form_agrees:
        return EXIT_MARGINAL
    return EXIT_OK


def _sidecar(config: RunConfig, out_dir: Path, threads: int, extra: dict) -> dict:
    return {
        "config_text": config.raw_text,
        "wave": {"a": config.pw.a, "k": config.pw.k, "omega": config.pw.omega},
        "grid": {"length": config.grid.length, "n": config.grid.n,
                 "dx": config.grid.dx},
        "solver": {"dt": config.split.dt, "t_end": config.split.t_end,
                   "sample_every": config.split.sample_every,
                   "mass": config.split.mass},
        "versions": {"kgplane": __version__, "python": platform.python_version(),
                     "numpy": np.__version__},
        "threads": threads,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        **extra,
    }


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _, _, verdict = _classify(config)
    if verdict.verdict == UNSTABLE and not args.force:
        print("refusing to simulate a spectrally unstable configuration "
              "(rerun with --force)", file=sys.stderr)
        return EXIT_CONFIG

    snapshot_times = _parse_times(args.snapshot_times)
    csv_path = out_dir / config.diagnostics_name
    snapshot_files = []
    e0 = None
    try:
        with open(csv_path, "w") as fh:
            fh.write(DIAGNOSTICS_HEADER + "\n")
            for rec in simulate(config.grid, config.pw, config.f, config.pm,
                                config.pert, config.split,
                                window_center=config.window_center,
                                window_radius=config.window_radius,
                                delta2=config.delta2,
                                snapshot_times=snapshot_times,
                                allow_condition_violation=args.force):
                if e0 is None:
                    e0 = rec.energy.total
                if rec.scheduled:
                    d = rec.diagnostics
                    rel_drift = abs(rec.energy.total - e0) / max(abs(e0), 1.0)
                    row = [d.t, d.rho_l2, d.rho_x_l2, d.theta_l2, d.theta_x_l2,
                           d.theta_linf, d.rho_t_l2, d.theta_t_l2,
                           d.orbital_dist, d.gamma, rec.energy.total, rel_drift]
                    fh.write(",".join(_fmt(v) for v in row) + "\n")
                    fh.flush()
                if rec.state is not None:
                    snapshot_files.append(_write_snapshot(
                        rec.state, config.grid, out_dir, rec.snapshot_time))
    except NonFinite as exc:
        print(f"aborted: {exc} (partial CSV kept at {csv_path})", file=sys.stderr)
        _write_sidecar(config, out_dir, csv_path, args.threads, snapshot_files,
                       aborted=str(exc))
        return EXIT_INTERNAL
    _write_sidecar(config, out_dir, csv_path, args.threads, snapshot_files)
    print(f"wrote {csv_path}")
    for name in snapshot_files:
        print(f"wrote {out_dir / name}")
    return EXIT_OK


def _write_sidecar(config, out_dir, csv_path, threads, snapshot_files,
                   aborted=None):
    meta = _sidecar(config, out_dir, threads, {
        "diagnostics": csv_path.name,
        "snapshots": snapshot_files,
        **({"aborted": aborted} if aborted else {}),
    })
    with open(csv_path.with_suffix(csv_path.suffix + ".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def _parse_times(spec: str | None) -> tuple[float, ...]:
    if not spec:
        return ()
    try:
        return tuple(float(part) for part in spec.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"--snapshot-times: {exc}") from exc


def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t!r}.csv"


def _write_snapshot(state: State, grid: PeriodicGrid, out_dir: Path,
                    requested_t: float) -> str:
    name = _snapshot_name(requested_t)
    with open(out_dir / name, "w") as fh:
        fh.write(SNAPSHOT_HEADER + "\n")
        for j in range(grid.n):
            fh.write(",".join(_fmt(v) for v in (
                grid.x[j], state.u[j].real, state.u[j].imag,
                state.ut[j].real, state.ut[j].imag)) + "\n")
    return name


def cmd_spectrum(args) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _, samples, verdict = _classify(config)
    path = out_dir / config.spectrum_name
    with open(path, "w") as fh:
        fh.write(SPECTRUM_HEADER + "\n")
        for s in samples:
            row = ([s.ell] + [r.real for r in s.roots]
                   + [r.imag for r in s.roots] + [s.discriminant])
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    witness = (f" at ell = {_fmt(verdict.witness_ell)}"
               if verdict.witness_ell is not None else "")
    print(f"verdict: {verdict.verdict}{witness} "
          f"(closed form {'agrees' if verdict.closed_form_agrees else 'disagrees'})")
    print(f"wrote {path}")
    if verdict.verdict == MARGINAL or not verdict.closed_form_agrees:
        return EXIT_MARGINAL
    return EXIT_OK


def read_diagnostics_csv(path: Path) -> dict[str, list[float]]:
    """Diagnostics CSV as named columns; SchemaMismatch on malformed files."""
    if not path.exists():
        raise FileNotFoundError(path)
    lines = path.read_text().strip().splitlines()
    if not lines or lines[0] != DIAGNOSTICS_HEADER:
        raise SchemaMismatch(
            f"{path}: header does not match the diagnostics schema"
        )
    names = lines[0].split(",")
    columns: dict[str, list[float]] = {name: [] for name in names}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(names):
            raise SchemaMismatch(f"{path}:{lineno}: expected {len(names)} fields")
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise SchemaMismatch(f"{path}:{lineno}: {exc}") from exc
        for name, value in zip(names, values):
            columns[name].append(value)
    return columns


def cmd_fit(args) -> int:
    columns = read_diagnostics_csv(Path(args.csv))
    if args.column not in columns:
        raise SchemaMismatch(f"no column {args.column!r} in {args.csv}")
    series = list(zip(columns["t"], columns[args.column]))
    fit = loglog_fit(series, args.window)
    print(f"slope = {fit.slope!r}")
    print(f"intercept = {fit.intercept!r}")
    print(f"r2 = {fit.r2!r}")
    return EXIT_OK


def read_snapshot_csv(path: Path, grid: PeriodicGrid, t: float) -> State:
    if not path.exists():
        raise FileNotFoundError(path)
    lines = path.read_text().strip().splitlines()
    if not lines or lines[0] != SNAPSHOT_HEADER:
        raise SchemaMismatch(f"{path}: header does not match the snapshot schema")
    if len(lines) - 1 != grid.n:
        raise SchemaMismatch(
            f"{path}: {len(lines) - 1} rows does not match grid n = {grid.n}"
        )
    u = np.empty(grid.n, dtype=complex)
    ut = np.empty(grid.n, dtype=complex)
    for j, line in enumerate(lines[1:]):
        try:
            _, re_u, im_u, re_ut, im_ut = (float(p) for p in line.split(","))
        except ValueError as exc:
            raise SchemaMismatch(f"{path}:{j + 2}: {exc}") from exc
        u[j] = re_u + 1j * im_u
        ut[j] = re_ut + 1j * im_ut
    return State(u=u, ut=ut, t=t)


def _time_from_snapshot_name(path: Path) -> float | None:
    name = path.name
    if name.startswith("snapshot_t") and name.endswith(".csv"):
        try:
            return float(name[len("snapshot_t"):-len(".csv")])
        except ValueError:
            return None
    return None


def cmd_energy(args) -> int:
    config = load_config(args.config)
    t = args.time if args.time is not None else _time_from_snapshot_name(
        Path(args.snapshot))
    if t is None:
        raise ConfigError(
            "snapshot time not encoded in the filename; pass --time"
        )
    state = read_snapshot_csv(Path(args.snapshot), config.grid, t)
    mass_regime = regime(config.pw, config.f)
    try:
        csel = select_c(config.pw, config.f, mass_regime, config.delta2)
    except ConditionViolated as exc:
        print(f"note: {exc}; using the regime formula anyway", file=sys.stderr)
        from .energy import CSelection, co_moving_speed
        csel = CSelection(c=co_moving_speed(config.pw, mass_regime,
                                            config.delta2),
                          regime=mass_regime, delta2=config.delta2)
    er = energy_of_state(state, config.grid, config.pw, config.f, csel)
    print(f"t = {_fmt(er.t)}")
    print(f"c = {_fmt(csel.c)} ({csel.regime})")
    for name in ("total", "kinetic", "gradient", "potential", "cross"):
        print(f"{name} = {_fmt(getattr(er, name))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgplane",
        description="Plane-wave stability toolkit for the complex "
                    "Klein-Gordon equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, out=False):
        p.add_argument("--config", default=None,
                       help="config file (defaults reproduce the reference run)")
        if out:
            p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("classify", help="dispersion, condition, and stability verdicts")
    add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="run the splitting integrator, write diagnostics CSV")
    add_common(p, out=True)
    p.add_argument("--force", action="store_true",
                   help="simulate even if classified unstable")
    p.add_argument("--threads", type=int, default=1,
                   help="recorded in the metadata sidecar")
    p.add_argument("--snapshot-times", default=None,
                   help="comma-separated times for full-field snapshots")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="write the pencil-spectrum CSV")
    add_common(p, out=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fit", help="power-law fit of a diagnostics column")
    p.add_argument("--csv", required=True, help="diagnostics CSV path")
    p.add_argument("--column", default="theta_l2")
    p.add_argument("--window", type=float, default=0.25,
                   help="trailing fraction of samples to fit")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("energy", help="energy breakdown of a snapshot CSV")
    add_common(p)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--time", type=float, default=None,
                   help="snapshot time (default: parsed from the filename)")
    p.set_defaults(func=cmd_energy)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except SchemaMismatch as exc:
        print(f"malformed data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KgplaneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
