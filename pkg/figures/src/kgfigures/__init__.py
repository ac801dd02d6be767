"""Figure rendering for the plane-wave stability toolkit's CSV outputs."""

from .render import FigureSpec, phase_support_width, render, trailing_loglog_slope
from .schema import (SchemaMismatch, read_diagnostics, read_metadata,
                     read_snapshot)

__all__ = ["FigureSpec", "SchemaMismatch", "phase_support_width", "render",
           "read_diagnostics", "read_metadata", "read_snapshot",
           "trailing_loglog_slope"]
__version__ = "0.1.0"
