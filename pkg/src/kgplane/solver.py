"""Strang-splitting time integrator for u_tt - u_xx + f(|u|^2) u = 0 on the
periodic grid.

The equation is split around a reference mass m into the exactly solvable
linear flow u_tt = u_xx - m u (diagonal in Fourier space) and the pointwise
kick u_t' = -(f(|u|^2) - m) u.  With m = f(a^2) the background plane wave is
an exact solution of both substeps, so the unperturbed wave does not drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .energy import CSelection, EnergyReport, co_moving_speed, energy_of_state, select_c
from .errors import ConditionViolated, NonFinite
from .field import PeriodicGrid, State, build_initial
from .model import Nonlinearity, PhaseModulation, PlaneWave, regime
from .polar import PolarDiagnostics, decompose, diagnostics

# cosh/sinh branch guard: Omega~*dt beyond this overflows double precision
# long before the result is meaningful.
COSH_GUARD = 50.0


@dataclass(frozen=True)
class SplitConfig:
    """Time-stepping parameters; mass is the linear-split mass m."""

    dt: float
    mass: float
    t_end: float
    sample_every: int = 1

    def __post_init__(self):
        if not 0.0 < self.dt <= 0.1:
            raise ValueError(f"dt must lie in (0, 0.1], got {self.dt}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")

    @classmethod
    def for_wave(cls, pw: PlaneWave, f: Nonlinearity, dt: float, t_end: float,
                 sample_every: int = 1, mass: float | None = None) -> "SplitConfig":
        """Default mass m = f(a^2), which freezes the background wave exactly."""
        m = f(pw.a * pw.a) if mass is None else mass
        return cls(dt=dt, mass=float(m), t_end=t_end, sample_every=sample_every)


@dataclass(frozen=True)
class Perturbation:
    """Gaussian perturbation amplitudes for the initial data."""

    w0_amp: complex
    v0_amp: complex
    width: float
    center: float


@lru_cache(maxsize=16)
def _propagator(n: int, length: float, mass: float, dt: float):
    """Mode-wise coefficients (C, S, G) of the exact linear flow over dt:

        (uhat, uthat) -> (C uhat + S uthat, G uhat + C uthat)

    with Omega_m^2 = xi_m^2 + mass:
      Omega^2 > 0: C = cos(Omega dt), S = sin(Omega dt)/Omega, G = -Omega sin(Omega dt)
      Omega^2 < 0: cosh/sinh analogue with Omega~ = sqrt(-Omega^2)
      Omega^2 = 0: C = 1, S = dt, G = 0
    """
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    om2 = xi * xi + mass
    c = np.ones(n)
    s = np.full(n, dt)
    g = np.zeros(n)
    pos = om2 > 0.0
    if np.any(pos):
        om = np.sqrt(om2[pos])
        c[pos] = np.cos(om * dt)
        s[pos] = np.sin(om * dt) / om
        g[pos] = -om * np.sin(om * dt)
    neg = om2 < 0.0
    if np.any(neg):
        omt = np.sqrt(-om2[neg])
        if np.max(omt) * abs(dt) > COSH_GUARD:
            raise NonFinite(
                f"linear flow overflows: |Omega~|*dt = {np.max(omt) * abs(dt):.3g} > {COSH_GUARD}"
            )
        c[neg] = np.cosh(omt * dt)
        s[neg] = np.sinh(omt * dt) / omt
        g[neg] = omt * np.sinh(omt * dt)
    return c, s, g


def linear_flow(state: State, grid: PeriodicGrid, mass: float, dt: float) -> State:
    """Exact flow of u_tt = u_xx - mass*u over dt; advances time by dt."""
    c, s, g = _propagator(grid.n, grid.length, mass, dt)
    uh = np.fft.fft(state.u)
    vh = np.fft.fft(state.ut)
    return State(
        u=np.fft.ifft(c * uh + s * vh),
        ut=np.fft.ifft(g * uh + c * vh),
        t=state.t + dt,
    )


def nonlinear_kick(state: State, f: Nonlinearity, mass: float, dt: float) -> State:
    """Exact flow of u' = 0, u_t' = -(f(|u|^2) - mass) u over dt.

    Time bookkeeping is left to strang_step.
    """
    gain = f(np.abs(state.u) ** 2) - mass
    return State(u=state.u, ut=state.ut - dt * gain * state.u, t=state.t)


def strang_step(state: State, grid: PeriodicGrid, f: Nonlinearity,
                mass: float, dt: float) -> State:
    """Second-order step: kick(dt/2) o linear(dt) o kick(dt/2)."""
    half = 0.5 * dt
    s = nonlinear_kick(state, f, mass, half)
    s = linear_flow(s, grid, mass, dt)
    s = nonlinear_kick(s, f, mass, half)
    if not s.is_finite():
        raise NonFinite(f"non-finite field after step to t = {s.t}")
    return s


@dataclass(frozen=True)
class SampleRecord:
    """One diagnostics sample; state is attached at requested snapshot times.

    scheduled is False for records emitted only because a snapshot was due;
    snapshot_time echoes the requested time (the state carries the exact
    step time, which differs by accumulated rounding).
    """

    diagnostics: PolarDiagnostics
    energy: EnergyReport
    state: State | None = None
    scheduled: bool = True
    snapshot_time: float | None = None

    @property
    def t(self) -> float:
        return self.diagnostics.t


@dataclass
class SimulationResult:
    samples: list[SampleRecord]
    snapshots: list[State]

    def series(self, name: str):
        """(t, value) pairs of a diagnostics field across scheduled samples."""
        return [(r.t, getattr(r.diagnostics, name)) for r in self.samples]

    def energy_reports(self) -> list[EnergyReport]:
        return [r.energy for r in self.samples]


def simulate(
    grid: PeriodicGrid,
    pw: PlaneWave,
    f: Nonlinearity,
    pm: PhaseModulation,
    pert: Perturbation,
    cfg: SplitConfig,
    window_center: float,
    window_radius: float,
    delta2: float = 0.05,
    snapshot_times: tuple[float, ...] = (),
    allow_condition_violation: bool = False,
) -> Iterator[SampleRecord]:
    """Step the perturbed wave from t = 0 to t_end, yielding diagnostics and
    energy every sample_every steps (plus at requested snapshot times).

    Deterministic for a fixed configuration.  NonFinite from a blown-up step
    propagates after all earlier samples have been yielded.
    """
    mass_regime = regime(pw, f)
    try:
        csel = select_c(pw, f, mass_regime, delta2)
    except ConditionViolated:
        if not allow_condition_violation:
            raise
        csel = CSelection(c=co_moving_speed(pw, mass_regime, delta2),
                          regime=mass_regime, delta2=delta2)

    state = build_initial(grid, pw, pm, pert.w0_amp, pert.v0_amp,
                          pert.width, pert.center)
    n_steps = int(round(cfg.t_end / cfg.dt))
    snap_steps: dict[int, float] = {}
    for ts in sorted(snapshot_times):
        snap_steps.setdefault(min(max(int(round(ts / cfg.dt)), 0), n_steps), ts)
    prev = None

    def make_record(s: State, scheduled: bool, snap_t: float | None) -> SampleRecord:
        nonlocal prev
        pf = decompose(s, grid, pw, pm, previous=prev)
        prev = pf
        diag = diagnostics(pf, grid, pw, pm, window_center, window_radius)
        er = energy_of_state(s, grid, pw, f, csel)
        return SampleRecord(diagnostics=diag, energy=er,
                            state=s if snap_t is not None else None,
                            scheduled=scheduled, snapshot_time=snap_t)

    yield make_record(state, scheduled=True, snap_t=snap_steps.get(0))
    for i in range(1, n_steps + 1):
        state = strang_step(state, grid, f, cfg.mass, cfg.dt)
        scheduled = (i % cfg.sample_every == 0) or i == n_steps
        snap_t = snap_steps.get(i)
        if scheduled or snap_t is not None:
            yield make_record(state, scheduled=scheduled, snap_t=snap_t)


def run_simulation(*args, **kwargs) -> SimulationResult:
    """Collect simulate() into lists of scheduled samples and snapshots."""
    samples = []
    snapshots = []
    for rec in simulate(*args, **kwargs):
        if rec.scheduled:
            samples.append(rec)
        if rec.state is not None:
            snapshots.append(rec.state)
    return SimulationResult(samples=samples, snapshots=snapshots)
