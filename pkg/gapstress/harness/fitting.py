"""
Rate fits on log-log data and additive-constant estimates.
"""

import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats

from ..errors import InvalidSeriesError
from ..models import ConstantEstimate, RateFitResult

logger = structlog.get_logger()

Series = Sequence[Tuple[float, float]]

# the coarsest point is dropped when its residual exceeds this multiple of the median
OUTLIER_FACTOR = 3.0


def _prepare(series: Series, min_points: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    if len(series) < min_points:
        raise InvalidSeriesError(f"need at least {min_points} points, got {len(series)}")
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidSeriesError("series must be a list of (eps, value) pairs")
    if not np.all(np.isfinite(arr)):
        raise InvalidSeriesError("series contains non-finite entries")
    if np.any(arr[:, 0] <= 0):
        raise InvalidSeriesError("eps values must be positive")
    order = np.argsort(-arr[:, 0], kind="stable")
    return arr[order, 0], arr[order, 1]


def _linear_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, np.ndarray]:
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(slope), float(intercept), y - (slope * x + intercept)


def fit_rate(
    series: Series,
    logarithmic: bool = False,
    drop_outliers: bool = True,
    confidence: float = 0.95,
) -> RateFitResult:
    """
    Least-squares power law value ~ prefactor * eps^exponent.

    For logarithmic quantities the fit is value ~ prefactor * |log eps|^exponent,
    so a pure |log eps| law has exponent 1.

    Args:
        series: (eps, value) pairs, at least 3, all values positive
        logarithmic: Fit against |log eps| instead of eps
        drop_outliers: Drop the coarsest point when its residual exceeds
            3x the median residual (needs at least 4 points)
        confidence: Level of the t-distribution half-width

    Returns:
        RateFitResult with residuals in the order of decreasing eps
    """
    eps, vals = _prepare(series)
    if np.any(vals <= 0):
        raise InvalidSeriesError("rate fits need positive values")
    if logarithmic and np.any(eps >= 1):
        raise InvalidSeriesError("logarithmic fits need eps < 1")

    x = np.log(np.abs(np.log(eps))) if logarithmic else np.log(eps)
    y = np.log(vals)
    slope, intercept, res = _linear_fit(x, y)

    dropped: List[float] = []
    if drop_outliers and len(x) >= 4:
        med = float(np.median(np.abs(res)))
        if abs(res[0]) > max(OUTLIER_FACTOR * med, 1e-10):
            dropped.append(float(eps[0]))
            logger.debug("Coarsest point dropped", eps=float(eps[0]), residual=float(res[0]), median=med)
            x, y, eps = x[1:], y[1:], eps[1:]
            slope, intercept, res = _linear_fit(x, y)

    n = len(x)
    half = 0.0
    if n > 2:
        sxx = float(np.sum((x - x.mean()) ** 2))
        s2 = float(np.sum(res ** 2)) / (n - 2)
        half = float(stats.t.ppf(0.5 + confidence / 2, n - 2) * math.sqrt(s2 / sxx)) if sxx > 0 else math.inf

    if not math.isfinite(slope):
        raise InvalidSeriesError("fitted exponent is not finite")
    return RateFitResult(
        exponent=slope,
        prefactor=math.exp(intercept),
        residuals=[float(r) for r in res],
        half_width=half,
        logarithmic=logarithmic,
        n_points=n,
        dropped=dropped,
    )


def cauchy_series(series: Series) -> List[Tuple[float, float]]:
    """|v(eps_k) - v(eps_{k+1})| attached to eps_k, for a ladder sorted by decreasing eps."""
    eps, vals = _prepare(series, min_points=2)
    return [(float(eps[k]), float(abs(vals[k] - vals[k + 1]))) for k in range(len(eps) - 1)]


def estimate_constants(
    series: Series,
    law: Callable[[float], float],
    correction_powers: Sequence[float] = (),
) -> ConstantEstimate:
    """
    Additive constant left after subtracting a known leading law.

    Fits value - law(eps) = C + sum_j c_j eps^{p_j} by least squares.

    Args:
        series: (eps, value) pairs
        law: Leading term as a function of eps
        correction_powers: Optional powers p_j of higher-order corrections

    Returns:
        ConstantEstimate; trend_growing is set when the misfit at the smallest eps
        exceeds the misfit at the largest eps by more than 10%
    """
    eps, vals = _prepare(series, min_points=max(2, len(correction_powers) + 1))
    rem = vals - np.array([law(float(e)) for e in eps])
    if not np.all(np.isfinite(rem)):
        raise InvalidSeriesError("leading law is not finite on the series")

    cols = [np.ones_like(eps)] + [eps ** p for p in correction_powers]
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, rem, rcond=None)
    dev = rem - A @ coef

    floor = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
    growing = bool(abs(dev[-1]) > 1.1 * abs(dev[0]) + floor)
    if growing:
        logger.warning("Constant fit residuals grow as eps decreases", first=float(dev[0]), last=float(dev[-1]))
    return ConstantEstimate(
        constant=float(coef[0]),
        residuals=[float(d) for d in dev],
        correction_coefficients=[float(c) for c in coef[1:]],
        trend_growing=growing,
    )
