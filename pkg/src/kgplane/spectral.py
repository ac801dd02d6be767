"""Spectral stability of the plane wave via the quadratic pencil of the
linearized perturbation equation.

Writing the linearization in the co-moving frame as a real system in
Z = (Re z, Im z) gives Z_tt + J_c(d_y) Z_t + H_c(d_y) Z = 0.  Per Fourier
frequency ell the spectrum consists of the roots lambda of

    E_c(lambda, ell) = det(lambda^2 I + lambda J_c(i ell) + H_c(i ell)),

a quartic in lambda.  The substitution lambda = i W at c = 0 turns E_0 into a
real depressed quartic in W, which drives the discriminant analysis and a
realness certificate that keeps eigenvalue noise out of the verdicts.  Roots
at any c follow from the frame-shift identity
E_c(lambda, ell) = E_0(lambda - i c ell, ell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import CSelection
from .errors import DegenerateLeadingCoefficient
from .model import Nonlinearity, PlaneWave

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"

# Max Re(lambda) above the first threshold is instability; below the second
# (plus closed-form agreement) is stability.  The gap absorbs root-finder
# noise near double roots.
UNSTABLE_THRESHOLD = 1e-3
STABLE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class SymbolMatrices:
    """Fourier symbols J_c(i ell) and H_c(i ell) of the linearization."""

    J: np.ndarray
    H: np.ndarray
    ell: float
    c: float


@dataclass(frozen=True)
class SpectrumSample:
    """Pencil roots and discriminant at one Fourier frequency."""

    ell: float
    roots: tuple[complex, complex, complex, complex]
    max_re: float
    discriminant: float


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: str
    witness_ell: float | None
    closed_form_agrees: bool


def _qval(pw: PlaneWave, f: Nonlinearity) -> float:
    asq = pw.a * pw.a
    return asq * f.derivative(asq)


def symbols(pw: PlaneWave, f: Nonlinearity, c: float, ell: float) -> SymbolMatrices:
    """J = [[-2ic ell, -2 omega], [2 omega, -2ic ell]] and the Hermitian
    H = [[(1-c^2) ell^2 + 2 a^2 f'(a^2), 2(c omega + k) i ell],
         [-2(c omega + k) i ell,         (1-c^2) ell^2]]."""
    q = _qval(pw, f)
    r = c * pw.omega + pw.k
    g = (1.0 - c * c) * ell * ell
    J = np.array([[-2j * c * ell, -2.0 * pw.omega],
                  [2.0 * pw.omega, -2j * c * ell]], dtype=complex)
    H = np.array([[g + 2.0 * q, 2j * r * ell],
                  [-2j * r * ell, g]], dtype=complex)
    return SymbolMatrices(J=J, H=H, ell=float(ell), c=float(c))


def pencil_det(sym: SymbolMatrices, lam: complex) -> complex:
    """det(lambda^2 I + lambda J + H), the quartic E_c(lambda, ell)."""
    m = lam * lam * np.eye(2) + lam * sym.J + sym.H
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def pencil_coeffs(pw: PlaneWave, f: Nonlinearity, c: float, ell: float) -> np.ndarray:
    """Coefficients of E_c(., ell) in lambda, highest degree first.

    Symbolic expansion of the 2x2 determinant; cross-checked against
    pencil_det in the test suite.
    """
    q = _qval(pw, f)
    r = c * pw.omega + pw.k
    g = (1.0 - c * c) * ell * ell
    beta = -2j * c * ell
    return np.array([
        1.0,
        2.0 * beta,
        beta * beta + 2.0 * g + 2.0 * q + 4.0 * pw.omega**2,
        2.0 * beta * (g + q) - 8j * pw.omega * r * ell,
        g * (g + 2.0 * q) - 4.0 * r * r * ell * ell,
    ], dtype=complex)


def quartic_roots(coeffs) -> np.ndarray:
    """All roots of a degree-4 polynomial (coefficients highest first).

    Companion-matrix eigenvalues (numpy.roots) after exact deflation of zero
    roots, followed by guarded Newton polishing.  Deflating trailing zero
    coefficients first keeps the frequent exact double root at the origin
    from picking up eigenvalue-solver noise.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) != 5:
        raise ValueError(f"expected 5 coefficients, got {len(coeffs)}")
    if coeffs[0] == 0:
        raise DegenerateLeadingCoefficient("leading quartic coefficient is zero")
    work = list(coeffs / coeffs[0])
    zeros = []
    while len(work) > 1 and work[-1] == 0:
        work.pop()
        zeros.append(0.0 + 0.0j)
    if len(work) > 1:
        found = list(np.roots(work))
    else:
        found = []
    deriv = np.polyder(coeffs)
    polished = []
    for root in found:
        best = root
        best_val = abs(np.polyval(coeffs, best))
        for _ in range(3):
            dval = np.polyval(deriv, best)
            if dval == 0:
                break
            cand = best - np.polyval(coeffs, best) / dval
            cand_val = abs(np.polyval(coeffs, cand))
            if cand_val >= best_val:
                break
            best, best_val = cand, cand_val
        polished.append(complex(best))
    roots = np.array(polished + zeros, dtype=complex)
    return roots[np.lexsort((roots.imag, roots.real))]


def _w_quartic(pw: PlaneWave, f: Nonlinearity, ell: float):
    """Real depressed quartic W^4 + p W^2 + s W + e with E_0(iW, ell) = 0."""
    q = _qval(pw, f)
    ksq = pw.k * pw.k
    osq = pw.omega * pw.omega
    p = -(2.0 * ell * ell + 2.0 * q + 4.0 * osq)
    s = 8.0 * pw.omega * pw.k * ell
    e = ell * ell * (ell * ell + 2.0 * q - 4.0 * ksq)
    return p, s, e


def _quartic_discriminant(p: float, s: float, e: float) -> float:
    """Discriminant of x^4 + p x^2 + s x + e (universal degree-4 formula with
    the cubic coefficient zero)."""
    return (256.0 * e**3 - 128.0 * p * p * e * e + 144.0 * p * s * s * e
            - 27.0 * s**4 + 16.0 * p**4 * e - 4.0 * p**3 * s * s)


def _certified_all_real(p: float, s: float, e: float) -> bool:
    """True when x^4 + p x^2 + s x + e provably has four real roots
    (distinct): positive discriminant with p < 0 and p^2 - 4e > 0."""
    return (_quartic_discriminant(p, s, e) > 0.0 and p < 0.0
            and p * p - 4.0 * e > 0.0)


def discriminant(pw: PlaneWave, f: Nonlinearity, ell: float) -> float:
    """Discriminant of the real quartic W -> E_0(iW, ell).

    Computed from the coefficient formula rather than from roots to avoid
    cancellation near double roots.  Negative values certify a non-real pair,
    hence spectral instability at that frequency.
    """
    return _quartic_discriminant(*_w_quartic(pw, f, ell))


def ddelta0_closed_form(pw: PlaneWave, f: Nonlinearity) -> float:
    """Closed form of the discriminant's second derivative at ell = 0:

        1024 a^2 f'(a^2) (2 omega^2 + a^2 f'(a^2))^3
             (2 omega^2 - 2 k^2 + a^2 f'(a^2))

    Its sign decides whether sideband frequencies destabilize the wave.
    """
    q = _qval(pw, f)
    osq = pw.omega * pw.omega
    return 1024.0 * q * (2.0 * osq + q) ** 3 * (2.0 * osq - 2.0 * pw.k**2 + q)


def sample_at(pw: PlaneWave, f: Nonlinearity, c: float, ell: float) -> SpectrumSample:
    """Pencil roots at one frequency.

    Roots are found for the real W-quartic at c = 0 and shifted by i*c*ell
    (which leaves real parts untouched).  When the realness certificate
    holds, max_re is exactly zero; otherwise it is read off the roots.
    """
    p, s, e = _w_quartic(pw, f, ell)
    w_roots = quartic_roots([1.0, 0.0, p, s, e])
    lam = 1j * w_roots + 1j * c * ell
    if _certified_all_real(p, s, e):
        max_re = 0.0
    else:
        max_re = float(np.max(np.abs(w_roots.imag)))
    return SpectrumSample(
        ell=float(ell),
        roots=tuple(complex(v) for v in lam),
        max_re=max_re,
        discriminant=_quartic_discriminant(p, s, e),
    )


def classify_closed_form(pw: PlaneWave, f: Nonlinearity) -> str | None:
    """Closed-form verdict where the inequality classification applies:

      f(a^2) > 0: stable if f'(a^2) > 0; unstable if -2 f(a^2) < a^2 f'(a^2) < 0
      f(a^2) < 0: stable if a^2 f'(a^2) > -2 f(a^2); unstable if
                  0 < a^2 f'(a^2) < -2 f(a^2)

    Returns None outside these hypotheses (including the zero-mass boundary).
    """
    asq = pw.a * pw.a
    fa = f(asq)
    q = asq * f.derivative(asq)
    if fa > 0.0:
        if f.derivative(asq) > 0.0:
            return STABLE
        if -2.0 * fa < q < 0.0:
            return UNSTABLE
        return None
    if fa < 0.0:
        if q > -2.0 * fa:
            return STABLE
        if 0.0 < q < -2.0 * fa:
            return UNSTABLE
        return None
    return None


def scan_grid(ell_max: float, n_samples: int) -> np.ndarray:
    """Uniform grid on [-ell_max, ell_max] refined 8x on the central eighth,
    where sideband instabilities live; always contains ell = 0."""
    base = np.linspace(-ell_max, ell_max, n_samples)
    refined = np.linspace(-ell_max / 8.0, ell_max / 8.0, n_samples)
    return np.unique(np.concatenate([base, refined, [0.0]]))


def scan(pw: PlaneWave, f: Nonlinearity, c: float, ell_max: float,
         n_samples: int = 512) -> tuple[list[SpectrumSample], StabilityVerdict]:
    """Sample the pencil spectrum over the frequency grid and classify.

    unstable: max Re lambda >= 1e-3 somewhere (witness_ell reported);
    stable:   max Re lambda <= 1e-8 everywhere and the closed-form
              classification agrees; marginal otherwise.
    """
    if not ell_max > 0:
        raise ValueError(f"ell_max must be positive, got {ell_max}")
    if n_samples < 64:
        raise ValueError(f"need at least 64 samples, got {n_samples}")
    samples = [sample_at(pw, f, c, ell) for ell in scan_grid(ell_max, n_samples)]
    worst = max(samples, key=lambda smp: smp.max_re)
    gmax = worst.max_re
    closed = classify_closed_form(pw, f)
    if gmax >= UNSTABLE_THRESHOLD:
        verdict = UNSTABLE
        witness = worst.ell
    elif gmax <= STABLE_THRESHOLD and closed == STABLE:
        verdict = STABLE
        witness = None
    else:
        verdict = MARGINAL
        witness = None
    agrees = ((closed == UNSTABLE and gmax >= UNSTABLE_THRESHOLD)
              or (closed == STABLE and gmax <= STABLE_THRESHOLD))
    return samples, StabilityVerdict(verdict=verdict, witness_ell=witness,
                                     closed_form_agrees=agrees)


def h_symbol_min_eig(pw: PlaneWave, f: Nonlinearity, csel: CSelection,
                     ell_grid) -> float:
    """Minimum over the grid of the smaller eigenvalue of Hermitian H_c(i ell).

    For H = [[g + 2q, 2ir ell], [-2ir ell, g]] with g = (1-c^2) ell^2 the
    closed-form eigenvalues are g + q +- sqrt(q^2 + 4 r^2 ell^2).
    """
    q = _qval(pw, f)
    c = csel.c
    r = pw.k + c * pw.omega
    ell = np.asarray(ell_grid, dtype=float)
    g = (1.0 - c * c) * ell * ell
    smaller = g + q - np.sqrt(q * q + 4.0 * r * r * ell * ell)
    return float(np.min(smaller))
