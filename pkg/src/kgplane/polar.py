"""Polar decomposition u = a exp(i(kx + omega t - theta_inf)) exp(rho + i theta)
of the perturbed wave, its diagnostic norms, the windowed orbital distance,
and power-law growth-rate regression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AmplitudeCollapse, InsufficientData, NonPositiveValue
from .field import PeriodicGrid, State, l2_norm, linf_norm, spectral_derivative
from .model import PhaseModulation, PlaneWave

# Below this fraction of the background amplitude the decomposition is
# considered broken (the perturbation left the small-amplitude regime).
COLLAPSE_FRACTION = 1e-8


@dataclass(frozen=True)
class PolarField:
    """Log-amplitude rho, unwrapped phase theta, and their time derivatives."""

    rho: np.ndarray
    theta: np.ndarray
    rho_t: np.ndarray
    theta_t: np.ndarray
    t: float


@dataclass(frozen=True)
class PolarDiagnostics:
    """Scalar norms of the polar fields plus the windowed orbital distance."""

    t: float
    rho_l2: float
    rho_x_l2: float
    rho_linf: float
    theta_l2: float
    theta_x_l2: float
    theta_linf: float
    rho_t_l2: float
    theta_t_l2: float
    orbital_dist: float
    gamma: float


def wrap_angle(phi: float) -> float:
    """Reduce an angle mod 2 pi into (-pi, pi]."""
    w = (phi + math.pi) % (2.0 * math.pi) - math.pi
    return math.pi if w == -math.pi else w


def decompose(
    state: State,
    grid: PeriodicGrid,
    pw: PlaneWave,
    pm: PhaseModulation,
    previous: PolarField | None = None,
) -> PolarField:
    """Extract (rho, theta, rho_t, theta_t) from the field.

    theta is the argument of u * exp(-i(kx + omega t - theta_inf)), unwrapped
    spatially from node 0; when a previous sample is supplied the whole array
    is shifted by the multiple of 2 pi that best continues theta at node 0 in
    time.  Derivatives come from rho_t + i theta_t = u_t/u - i omega.
    """
    absu = np.abs(state.u)
    if np.min(absu) < COLLAPSE_FRACTION * pw.a:
        raise AmplitudeCollapse(
            f"min |u| = {np.min(absu):.3e} below {COLLAPSE_FRACTION:g} * a at t = {state.t}"
        )
    carrier_phase = pw.k * grid.x + pw.omega * state.t - pm.theta(grid.x)
    rel = state.u * np.exp(-1j * carrier_phase)
    rho = np.log(absu / pw.a)
    theta = np.unwrap(np.angle(rel))
    if previous is not None:
        theta += 2.0 * math.pi * round((previous.theta[0] - theta[0]) / (2.0 * math.pi))
    deriv = state.ut / state.u - 1j * pw.omega
    return PolarField(rho=rho, theta=theta, rho_t=deriv.real, theta_t=deriv.imag,
                      t=state.t)


def recompose(pf: PolarField, grid: PeriodicGrid, pw: PlaneWave,
              pm: PhaseModulation) -> np.ndarray:
    """Rebuild u from a polar field (inverse of decompose)."""
    carrier_phase = pw.k * grid.x + pw.omega * pf.t - pm.theta(grid.x)
    return pw.a * np.exp(pf.rho) * np.exp(1j * (carrier_phase + pf.theta))


def _window_mask(grid: PeriodicGrid, center: float, radius: float) -> np.ndarray:
    dist = np.abs((grid.x - center + grid.length / 2.0) % grid.length
                  - grid.length / 2.0)
    return dist <= radius


def diagnostics(
    pf: PolarField,
    grid: PeriodicGrid,
    pw: PlaneWave,
    pm: PhaseModulation,
    window_center: float,
    window_radius: float,
) -> PolarDiagnostics:
    """Norms of the polar fields and the windowed orbital distance.

    gamma is theta at the node nearest window_center, reduced to (-pi, pi];
    orbital_dist is the discrete H1 norm of u - a exp(i(kx + omega t + gamma))
    over the nodes within window_radius of window_center (spectral derivative
    on the full grid, restricted to the window).
    """
    if window_radius > grid.length / 2.0:
        raise ValueError("window radius exceeds half the domain")
    rho_x = spectral_derivative(pf.rho.astype(complex), grid).real
    theta_x = spectral_derivative(pf.theta.astype(complex), grid).real
    j_star = round(window_center / grid.dx) % grid.n
    gamma = wrap_angle(float(pf.theta[j_star]))

    u = recompose(pf, grid, pw, pm)
    target = pw.a * np.exp(1j * (pw.k * grid.x + pw.omega * pf.t + gamma))
    diff = u - target
    diff_x = spectral_derivative(diff, grid)
    mask = _window_mask(grid, window_center, window_radius)
    orbital = math.sqrt(grid.dx * float(
        np.sum(np.abs(diff[mask]) ** 2 + np.abs(diff_x[mask]) ** 2)))

    return PolarDiagnostics(
        t=pf.t,
        rho_l2=l2_norm(pf.rho, grid),
        rho_x_l2=l2_norm(rho_x, grid),
        rho_linf=linf_norm(pf.rho),
        theta_l2=l2_norm(pf.theta, grid),
        theta_x_l2=l2_norm(theta_x, grid),
        theta_linf=linf_norm(pf.theta),
        rho_t_l2=l2_norm(pf.rho_t, grid),
        theta_t_l2=l2_norm(pf.theta_t, grid),
        orbital_dist=orbital,
        gamma=gamma,
    )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


def loglog_fit(series, window_fraction: float) -> FitResult:
    """Ordinary least squares on (log t, log value) over the trailing
    window_fraction of the samples.

    Samples with t <= 0 inside the window are dropped; a nonpositive value
    there raises NonPositiveValue, and fewer than 8 usable samples raise
    InsufficientData.
    """
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError(f"window_fraction must lie in (0, 1], got {window_fraction}")
    pairs = list(series)
    n_win = max(1, int(round(window_fraction * len(pairs))))
    window = pairs[-n_win:]
    ts, vals = [], []
    for t, v in window:
        if t <= 0.0:
            continue
        if v <= 0.0:
            raise NonPositiveValue(f"value {v} at t = {t} is not positive")
        ts.append(t)
        vals.append(v)
    if len(ts) < 8:
        raise InsufficientData(
            f"need >= 8 samples with t > 0 in the fit window, got {len(ts)}"
        )
    x = np.log(np.asarray(ts))
    y = np.log(np.asarray(vals))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(slope=float(slope), intercept=float(intercept), r2=r2)
