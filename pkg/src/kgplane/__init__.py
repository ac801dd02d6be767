"""Plane-wave stability toolkit for the 1-d complex Klein-Gordon equation
u_tt - u_xx + f(|u|^2) u = 0: Strang-splitting pseudospectral integration of
perturbed plane waves, polar (amplitude/phase) diagnostics, the conserved
co-moving energy, and closed-form spectral stability classification.
"""

from .energy import (CSelection, DriftReport, EnergyReport, co_moving_speed,
                     drift, energy_of_state, potential_U, select_c)
from .errors import (AmplitudeCollapse, ConditionViolated, ConfigError,
                     DegenerateLeadingCoefficient, DegenerateWave,
                     InadmissibleModulation, IncompatibleWaveNumber,
                     InsufficientData, KgplaneError, LengthMismatch,
                     NegativeRadicand, NonFinite, NonPositiveValue,
                     SchemaMismatch)
from .field import (PeriodicGrid, State, build_initial, dft, idft, l2_norm,
                    linf_norm, spectral_derivative)
from .model import (POSITIVE_MASS, TACHYONIC, ZERO_MASS, Nonlinearity,
                    PhaseModulation, PlaneWave, amplitude_from_dispersion,
                    close_dispersion, e_infty, regime, spectral_condition)
from .polar import (FitResult, PolarDiagnostics, PolarField, decompose,
                    diagnostics, loglog_fit, recompose)
from .solver import (Perturbation, SampleRecord, SimulationResult, SplitConfig,
                     linear_flow, nonlinear_kick, run_simulation, simulate,
                     strang_step)
from .spectral import (MARGINAL, STABLE, SpectrumSample, StabilityVerdict,
                       SymbolMatrices, UNSTABLE, classify_closed_form,
                       ddelta0_closed_form, discriminant, h_symbol_min_eig,
                       pencil_coeffs, pencil_det, quartic_roots, sample_at,
                       scan, scan_grid, symbols)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
