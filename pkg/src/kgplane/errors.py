"""Exception types shared across the package."""


class KgplaneError(Exception):
    """Base class for all package-specific errors."""


class NegativeRadicand(KgplaneError):
    """Dispersion relation has no admissible real frequency or amplitude."""


class InadmissibleModulation(KgplaneError):
    """Phase modulation not admissible in the given mass regime."""


class LengthMismatch(KgplaneError):
    """Array length does not match the grid."""


class IncompatibleWaveNumber(KgplaneError):
    """Wave number is not commensurate with the periodic domain."""


class NonFinite(KgplaneError):
    """A field acquired NaN/Inf entries (blow-up or too large a step)."""


class AmplitudeCollapse(KgplaneError):
    """|u| dropped below the polar-decomposition threshold."""


class InsufficientData(KgplaneError):
    """Not enough samples for the requested operation."""


class NonPositiveValue(KgplaneError):
    """Power-law fit requires positive values inside the fit window."""


class ConditionViolated(KgplaneError):
    """Stability condition fails; co-moving speed selection is undefined."""


class DegenerateWave(KgplaneError):
    """Speed-selection formula would divide by zero."""


class DegenerateLeadingCoefficient(KgplaneError):
    """Polynomial root finder received a zero leading coefficient."""


class ConfigError(KgplaneError):
    """Invalid run configuration."""


class SchemaMismatch(KgplaneError):
    """CSV file does not match the documented schema."""
