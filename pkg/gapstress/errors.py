"""
Exception hierarchy for gapstress.

Every error derives from GapStressError and, where the builtin meaning fits,
from ValueError or RuntimeError as well.
"""


class GapStressError(Exception):
    """Base class for all gapstress errors."""


class UnsupportedDimensionError(GapStressError, ValueError):
    """Spatial dimension other than 2 or 3."""


class DimensionMismatchError(GapStressError, ValueError):
    """Array shapes disagree with the declared dimension."""


class NonUnitNormalError(GapStressError, ValueError):
    """Normal vector is not of unit length."""


class OutOfChartError(GapStressError, ValueError):
    """Point lies outside the near-contact chart or the narrow region."""


class GeometryError(GapStressError, ValueError):
    """Inclusions do not fit, or the gap is degenerate."""


class UncoveredCaseError(GapStressError, ValueError):
    """No asymptotic law is available for the requested (d, m, alpha)."""


class DivergentIntegralError(GapStressError, ValueError):
    """Profile integral does not converge for the given (d, m)."""


class InvalidSeriesError(GapStressError, ValueError):
    """Data series cannot be fitted."""


class SolverError(GapStressError, RuntimeError):
    """Linear solve failed."""


class SingularSystemError(SolverError):
    """Reduced stiffness matrix is singular."""


class PointOutsideMeshError(GapStressError, ValueError):
    """Probe point is not covered by any matrix triangle."""


class ConfigError(GapStressError, ValueError):
    """Sweep configuration could not be loaded or validated."""


class ReportInputError(GapStressError, FileNotFoundError):
    """Results needed for a report are missing."""
