"""Conserved energy of the perturbation in the co-moving frame, the potential
U, the regime-dependent co-moving speed, and conservation monitoring.

With w(y, t) = u(x, t) exp(-i(kx + omega t))/a in the frame y = x - ct, the
energy is

    E = 1/2 integral (1 - c^2)|w_y|^2 + |w_t|^2 + U(|w|^2)
                      - 2(k + c omega) Im(w conj(w_y)) dy,

conserved along solutions for any c in (-1, 1).  The background phase factor
exp(-i theta_inf) is unimodular and cancels from every term, so the
modulation never enters the evaluation.  On the periodic grid the frame
shift y = x - ct is a relabeling of the quadrature nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (AmplitudeCollapse, ConditionViolated, DegenerateWave,
                     InsufficientData)
from .field import PeriodicGrid, State, spectral_derivative
from .model import (POSITIVE_MASS, TACHYONIC, ZERO_MASS, Nonlinearity,
                    PlaneWave, spectral_condition)
from .polar import COLLAPSE_FRACTION


@dataclass(frozen=True)
class CSelection:
    """Co-moving speed c in (-1, 1); delta2 is only used in the zero-mass regime."""

    c: float
    regime: str
    delta2: float = 0.05

    def __post_init__(self):
        if not -1.0 < self.c < 1.0:
            raise ValueError(f"co-moving speed must lie in (-1, 1), got {self.c}")


@dataclass(frozen=True)
class EnergyReport:
    """Energy of a state, split into its integrand contributions."""

    total: float
    kinetic: float
    gradient: float
    potential: float
    cross: float
    t: float


def potential_U(s, a: float, f: Nonlinearity):
    """U(s) = integral_1^s [f(a^2 v) - f(a^2)] dv in closed polynomial form.

    U(1) = U'(1) = 0 and U''(1) = a^2 f'(a^2).
    """
    s = np.asarray(s, dtype=float) if np.ndim(s) else float(s)
    asq = a * a
    fa = f(asq)
    acc = -fa * (s - 1.0)
    power = asq
    for j, c in enumerate(f.coeffs):
        acc = acc + c * power / asq * (s ** (j + 1) - 1.0) / (j + 1)
        power *= asq
    return acc


def co_moving_speed(pw: PlaneWave, mass_regime: str, delta2: float = 0.05) -> float:
    """Regime-dependent frame speed:

      positive mass: c = -k/omega  (so k + c omega = 0)
      tachyonic:     c = -omega/k
      zero mass:     c = -(k/omega)(1 - delta2), where k/omega = +-1
    """
    if mass_regime == POSITIVE_MASS:
        if pw.omega == 0.0:
            raise DegenerateWave("positive-mass speed needs omega != 0")
        return -pw.k / pw.omega
    if mass_regime == TACHYONIC:
        if pw.k == 0.0:
            raise DegenerateWave("tachyonic speed needs k != 0")
        return -pw.omega / pw.k
    if mass_regime == ZERO_MASS:
        if not 0.0 < delta2 < 1.0:
            raise ValueError(f"delta2 must lie in (0, 1), got {delta2}")
        if pw.omega == 0.0:
            raise DegenerateWave("zero-mass speed needs omega != 0")
        sign = pw.k / pw.omega
        if abs(abs(sign) - 1.0) > 1e-9:
            raise DegenerateWave(
                f"zero-mass regime requires |k/omega| = 1, got {sign}"
            )
        return -math.copysign(1.0, sign) * (1.0 - delta2)
    raise ValueError(f"unknown regime {mass_regime!r}")


def select_c(pw: PlaneWave, f: Nonlinearity, mass_regime: str,
             delta2: float = 0.05) -> CSelection:
    """Pick the co-moving speed for the energy's lower bound.

    Requires the stability condition; without it the energy is still
    conserved but ceases to control the perturbation norms.
    """
    report = spectral_condition(pw, f)
    if not report.satisfied:
        raise ConditionViolated(
            f"stability condition fails (margin = {report.margin:.6g}); "
            "speed selection is meaningless"
        )
    c = co_moving_speed(pw, mass_regime, delta2)
    return CSelection(c=c, regime=mass_regime, delta2=delta2)


def energy_of_state(state: State, grid: PeriodicGrid, pw: PlaneWave,
                    f: Nonlinearity, csel: CSelection) -> EnergyReport:
    """Rectangle-rule evaluation of the conserved energy.

    Components (z2 = w_t / sqrt(1 - c^2) is the rescaled co-moving time
    derivative; w_y via spectral derivative of the relabeled samples):

      kinetic   = 1/2 (1 - c^2) dx sum |z2|^2  = 1/2 dx sum |w_t|^2
      gradient  = 1/2 (1 - c^2) dx sum |w_y|^2
      potential = 1/2 dx sum U(|w|^2)
      cross     = -(k + c omega) dx sum Im(w conj(w_y))

    In the positive-mass regime the cross factor k + c omega vanishes exactly.
    """
    absu = np.abs(state.u)
    if np.min(absu) < COLLAPSE_FRACTION * pw.a:
        raise AmplitudeCollapse(
            f"min |u| = {np.min(absu):.3e} below {COLLAPSE_FRACTION:g} * a at t = {state.t}"
        )
    c = csel.c
    phase = np.exp(-1j * (pw.k * grid.x + pw.omega * state.t))
    w = state.u * phase / pw.a
    wx = spectral_derivative(w, grid)
    # Co-moving time derivative: w_t = (u_t + c u_x - i(ck + omega) u) e^{-i phase}/a,
    # rewritten through w and w_y to reuse the one transform.
    wt = state.ut * phase / pw.a + c * wx - 1j * pw.omega * w

    dx = grid.dx
    kinetic = 0.5 * dx * float(np.sum(np.abs(wt) ** 2))
    gradient = 0.5 * (1.0 - c * c) * dx * float(np.sum(np.abs(wx) ** 2))
    potential = 0.5 * dx * float(np.sum(potential_U(np.abs(w) ** 2, pw.a, f)))
    cross_factor = pw.k + c * pw.omega
    if csel.regime == POSITIVE_MASS:
        cross = 0.0
    else:
        cross = -cross_factor * dx * float(np.sum((w * np.conj(wx)).imag))
    total = kinetic + gradient + potential + cross
    return EnergyReport(total=total, kinetic=kinetic, gradient=gradient,
                        potential=potential, cross=cross, t=state.t)


def drift(reports) -> "DriftReport":
    """Largest relative energy drift |E(t) - E(0)| / max(|E(0)|, 1)."""
    reports = list(reports)
    if len(reports) < 2:
        raise InsufficientData("drift needs at least two energy reports")
    e0 = reports[0].total
    denom = max(abs(e0), 1.0)
    best = 0.0
    t_at = reports[0].t
    for r in reports[1:]:
        d = abs(r.total - e0) / denom
        if d > best:
            best = d
            t_at = r.t
    return DriftReport(max_rel_drift=best, t_at_max=t_at)


@dataclass(frozen=True)
class DriftReport:
    max_rel_drift: float
    t_at_max: float
