"""Parameter domain for plane waves a*exp(i(kx + omega*t)) of the complex
Klein-Gordon equation u_tt - u_xx + f(|u|^2) u = 0.

Covers polynomial nonlinearities f, the dispersion relation
omega^2 = k^2 + f(a^2), the stability condition
a^2 f'(a^2) > 2 max(0, -f(a^2)), the mass-regime classification by the sign
of f(a^2), and the catalog of background phase modulations theta_inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InadmissibleModulation, NegativeRadicand

# Mass regimes, classified by the sign of f(a^2).
POSITIVE_MASS = "positive_mass"
ZERO_MASS = "zero_mass"
TACHYONIC = "tachyonic"

REGIME_TOL = 1e-12

# Quadrature for E_inf integrals is truncated where the integrand drops
# below this threshold (integrands decay exponentially or integrably).
QUAD_TRUNCATION = 1e-14


@dataclass(frozen=True)
class Nonlinearity:
    """Polynomial nonlinearity f(nu) = sum_j coeffs[j] * nu**j."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("nonlinearity needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def cubic_defocusing(cls) -> "Nonlinearity":
        """f(nu) = 1 + nu, the defocusing cubic equation."""
        return cls((1.0, 1.0))

    @classmethod
    def cubic_focusing(cls) -> "Nonlinearity":
        """f(nu) = 1 - nu, the focusing cubic equation."""
        return cls((1.0, -1.0))

    def __call__(self, nu):
        """Evaluate f(nu) by Horner's rule (scalar or array)."""
        acc = np.zeros_like(np.asarray(nu, dtype=float)) if np.ndim(nu) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * nu + c
        return acc

    def derivative(self, nu):
        """Evaluate f'(nu) with exact polynomial coefficients."""
        acc = np.zeros_like(np.asarray(nu, dtype=float)) if np.ndim(nu) else 0.0
        for j in range(len(self.coeffs) - 1, 0, -1):
            acc = acc * nu + j * self.coeffs[j]
        return acc


@dataclass(frozen=True)
class PlaneWave:
    """Plane-wave parameters: amplitude a > 0, wave number k, frequency omega."""

    a: float
    k: float
    omega: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"amplitude must be positive, got a={self.a}")
        if self.k == 0.0 and self.omega == 0.0:
            raise ValueError("(k, omega) = (0, 0) is not a wave")

    @property
    def speed(self) -> float:
        """Wave speed s = -omega/k (requires k != 0)."""
        if self.k == 0.0:
            raise ValueError("standing wave (k = 0) has no finite speed")
        return -self.omega / self.k

    def dispersion_residual(self, f: Nonlinearity) -> float:
        """Relative residual of omega^2 = k^2 + f(a^2)."""
        lhs = self.omega * self.omega
        rhs = self.k * self.k + f(self.a * self.a)
        scale = max(abs(lhs), abs(rhs), 1.0)
        return abs(lhs - rhs) / scale


def close_dispersion(a: float, k: float, f: Nonlinearity) -> PlaneWave:
    """Close the dispersion relation for omega given (a, k).

    Takes the positive root omega = +sqrt(k^2 + f(a^2)).  A zero radicand is
    allowed when k != 0 (then omega = 0); otherwise there is no admissible
    frequency and NegativeRadicand is raised.
    """
    if not a > 0:
        raise ValueError(f"amplitude must be positive, got a={a}")
    radicand = k * k + f(a * a)
    if radicand < 0.0 or (radicand == 0.0 and k == 0.0):
        raise NegativeRadicand(
            f"k^2 + f(a^2) = {radicand} admits no frequency for k={k}"
        )
    return PlaneWave(a=float(a), k=float(k), omega=math.sqrt(radicand))


def amplitude_from_dispersion(k: float, omega: float, f: Nonlinearity) -> PlaneWave:
    """Close the dispersion relation for the amplitude given (k, omega).

    Solves f(nu) = omega^2 - k^2 for nu > 0 and returns the wave with
    a = sqrt(nu).  If several positive roots exist the smallest is taken.
    """
    target = omega * omega - k * k
    shifted = list(f.coeffs)
    shifted[0] -= target
    desc = np.array(shifted[::-1], dtype=float)
    if np.count_nonzero(desc) == 0:
        raise NegativeRadicand("dispersion relation is degenerate (f identically equal)")
    if len(f.coeffs) == 1:
        raise NegativeRadicand(
            f"constant nonlinearity cannot match omega^2 - k^2 = {target}"
        )
    roots = np.roots(desc)
    candidates = []
    for r in roots:
        if abs(r.imag) > 1e-9 * (1.0 + abs(r.real)):
            continue
        nu = float(r.real)
        # Newton polish on the exact polynomial.
        for _ in range(3):
            val = f(nu) - target
            der = f.derivative(nu)
            if der == 0.0:
                break
            step = val / der
            if not math.isfinite(step):
                break
            nu -= step
        if nu > 0.0 and abs(f(nu) - target) <= 1e-9 * (1.0 + abs(target)):
            candidates.append(nu)
    if not candidates:
        raise NegativeRadicand(
            f"no positive amplitude solves f(a^2) = omega^2 - k^2 = {target}"
        )
    return PlaneWave(a=math.sqrt(min(candidates)), k=float(k), omega=float(omega))


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the stability condition a^2 f'(a^2) > 2 max(0, -f(a^2))."""

    satisfied: bool
    margin: float


def spectral_condition(pw: PlaneWave, f: Nonlinearity) -> ConditionReport:
    """Evaluate the stability condition margin.

    margin = a^2 f'(a^2) - 2 max(0, -f(a^2)); satisfied iff margin > 0.
    The boundary margin == 0 reports satisfied=False without asserting
    stability or instability.
    """
    asq = pw.a * pw.a
    margin = asq * f.derivative(asq) - 2.0 * max(0.0, -f(asq))
    return ConditionReport(satisfied=margin > 0.0, margin=float(margin))


def regime(pw: PlaneWave, f: Nonlinearity) -> str:
    """Classify the mass regime by the sign of f(a^2) (tolerance 1e-12)."""
    fa = f(pw.a * pw.a)
    if fa > REGIME_TOL:
        return POSITIVE_MASS
    if fa < -REGIME_TOL:
        return TACHYONIC
    return ZERO_MASS


@dataclass(frozen=True)
class PhaseModulation:
    """Background phase profile theta_inf used in the initial data.

    Catalog:
      zero:        theta_inf == 0
      tanh_front:  theta_inf(x) = k x_minus (1 - tanh x)/2 + k x_plus (1 + tanh x)/2
      algebraic:   theta_inf(x) = (1 + eps^4 x^2)^(1/8), eps in (0, 1);
                   admissible only in the positive-mass regime (its derivative
                   is square-integrable but not integrable).
    """

    kind: str
    x_minus: float = 0.0
    x_plus: float = 0.0
    k: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "tanh_front", "algebraic"):
            raise ValueError(f"unknown modulation kind {self.kind!r}")
        if self.kind == "algebraic" and not 0.0 < self.epsilon < 1.0:
            raise ValueError("algebraic modulation needs epsilon in (0, 1)")

    @classmethod
    def zero(cls) -> "PhaseModulation":
        return cls(kind="zero")

    @classmethod
    def tanh_front(cls, x_minus: float, x_plus: float, k: float) -> "PhaseModulation":
        return cls(kind="tanh_front", x_minus=float(x_minus), x_plus=float(x_plus),
                   k=float(k))

    @classmethod
    def algebraic(cls, epsilon: float) -> "PhaseModulation":
        return cls(kind="algebraic", epsilon=float(epsilon))

    def theta(self, x):
        """theta_inf(x), vectorized."""
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "tanh_front":
            th = np.tanh(x)
            return (self.k * self.x_minus * (1.0 - th) / 2.0
                    + self.k * self.x_plus * (1.0 + th) / 2.0)
        return (1.0 + self.epsilon**4 * x * x) ** 0.125

    def theta_prime(self, x):
        """d(theta_inf)/dx, vectorized and overflow-safe."""
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "tanh_front":
            # sech^2(x) = 4 exp(-2|x|) / (1 + exp(-2|x|))^2 avoids cosh overflow.
            e = np.exp(-2.0 * np.abs(x))
            sech2 = 4.0 * e / (1.0 + e) ** 2
            return 0.5 * self.k * (self.x_plus - self.x_minus) * sech2
        e4 = self.epsilon**4
        return 0.25 * e4 * x * (1.0 + e4 * x * x) ** (-0.875)

    def is_trivial(self) -> bool:
        return self.kind == "zero" or (
            self.kind == "tanh_front" and self.k * (self.x_plus - self.x_minus) == 0.0
        )

    def admissible_for(self, mass_regime: str) -> bool:
        """Algebraic modulations require a positive mass; others are universal."""
        if self.kind == "algebraic":
            return mass_regime == POSITIVE_MASS
        return True


def _line_integral(g) -> float:
    """Integrate g >= 0 over the real line, truncated where g < QUAD_TRUNCATION.

    The truncation point is located by doubling; the integral is summed over
    dyadic panels so the adaptive rule resolves both the core and the tail.
    """
    x_cut = 1.0
    while (g(x_cut) >= QUAD_TRUNCATION or g(-x_cut) >= QUAD_TRUNCATION) and x_cut < 2**60:
        x_cut *= 2.0
    total = 0.0
    for sign in (1.0, -1.0):
        lo = 0.0
        hi = 1.0
        while lo < x_cut:
            hi = min(hi, x_cut)
            val, _ = quad(g, sign * lo, sign * hi, epsabs=1e-13, epsrel=1e-12)
            total += sign * val
            lo, hi = hi, 2.0 * hi
    return total


def e_infty(pm: PhaseModulation, mass_regime: str) -> float:
    """Modulation size E_inf = ||theta_inf'||_L2 (+ ||theta_inf'||_L1^(1/2)
    outside the positive-mass regime), by truncated adaptive quadrature."""
    if not pm.admissible_for(mass_regime):
        raise InadmissibleModulation(
            f"{pm.kind} modulation requires the positive-mass regime, got {mass_regime}"
        )
    if pm.is_trivial():
        return 0.0
    l2 = math.sqrt(_line_integral(lambda x: float(pm.theta_prime(x)) ** 2))
    if mass_regime == POSITIVE_MASS:
        return l2
    l1 = _line_integral(lambda x: abs(float(pm.theta_prime(x))))
    return l2 + math.sqrt(l1)
