"""Numeric kernels: Pearson correlation and sliding-window correlation scans.

The scan that powers both the forecaster and the leakage audit correlates a
short query vector (typically 13-14 points) against every window of a
series. Window means/stds are precomputed once per (series, window-length)
pair; the per-shift dot products are then a single direct correlation pass,
which for such short windows beats FFT-based schemes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class ConstantInputError(ValueError):
    """Correlation is undefined because an input has zero standard deviation."""


def _std_floor(mean: np.ndarray | float) -> np.ndarray | float:
    """Threshold below which a window is treated as constant."""
    return 1e-12 * (1.0 + np.abs(mean))


@dataclass(frozen=True)
class RollingStats:
    """Per-window mean/std (population, divisor n) for all length-w windows.

    ``valid`` marks windows whose std exceeds the constancy floor; constant
    windows have undefined correlation and are excluded from scans.
    """

    w: int
    mean: np.ndarray
    std: np.ndarray
    valid: np.ndarray


def pearson(a, b) -> float:
    """Pearson correlation of two equal-length vectors, clamped to [-1, 1].

    Uses the population definition of std (divisor n). Raises
    ConstantInputError when either vector is constant.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"expected equal-length 1-D vectors, got {a.shape} and {b.shape}")
    if a.size < 2:
        raise ValueError("correlation needs at least 2 points")
    da = a - a.mean()
    db = b - b.mean()
    na = np.sqrt(np.dot(da, da))
    nb = np.sqrt(np.dot(db, db))
    sqn = np.sqrt(a.size)
    if na / sqn <= _std_floor(a.mean()) or nb / sqn <= _std_floor(b.mean()):
        raise ConstantInputError("correlation undefined: constant input vector")
    r = np.dot(da, db) / (na * nb)
    return float(min(1.0, max(-1.0, r)))


def rolling_stats(series, w: int) -> RollingStats:
    """Mean/std of every length-w window of ``series``.

    Computed by the direct two-pass formula per window (vectorized), so the
    results match a per-window recomputation to within rounding even for
    large offsets; no prefix-sum cancellation is involved.
    """
    series = np.asarray(series, dtype=np.float64)
    if w < 1:
        raise ValueError(f"window length must be positive, got {w}")
    if series.size < w:
        raise ValueError(f"series length {series.size} < window length {w}")
    windows = sliding_window_view(series, w)
    mean = windows.mean(axis=1)
    dev = windows - mean[:, None]
    std = np.sqrt(np.einsum("ij,ij->i", dev, dev) / w)
    valid = std > _std_floor(mean)
    mean.flags.writeable = False
    std.flags.writeable = False
    valid.flags.writeable = False
    return RollingStats(w=w, mean=mean, std=std, valid=valid)


def _normalized_query(query: np.ndarray) -> np.ndarray:
    """Center (twice, to kill the fp residual) and scale a query to unit std."""
    q = query - query.mean()
    q -= q.mean()
    std = np.sqrt(np.dot(q, q) / q.size)
    if std <= _std_floor(query.mean()):
        raise ConstantInputError("sliding scan undefined: constant query")
    return q / std


def _window_correlations(centered: np.ndarray, stats: RollingStats, qhat: np.ndarray) -> np.ndarray:
    """r for every window of a (globally centered) series vs a normalized query.

    Invalid windows get NaN. ``qhat`` must be zero-mean unit-std with the
    same length as ``stats.w``.
    """
    w = stats.w
    dots = np.correlate(centered, qhat, mode="valid")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dots / (w * stats.std)
    r = np.clip(r, -1.0, 1.0)
    r[~stats.valid] = np.nan
    return r


def sliding_correlations(query, series, stats: RollingStats | None = None):
    """Correlate ``query`` against every length-w window of ``series``.

    Returns ``(taus, rs)`` where tau is the 1-based index of the window's
    last element (window = series[tau-w:tau]). Windows with zero std are
    omitted. Raises ConstantInputError for a constant query.
    """
    query = np.asarray(query, dtype=np.float64)
    series = np.asarray(series, dtype=np.float64)
    w = query.size
    if stats is None:
        stats = rolling_stats(series, w)
    elif stats.w != w or stats.mean.size != series.size - w + 1:
        raise ValueError("rolling stats do not match the query length and series")
    qhat = _normalized_query(query)
    r = _window_correlations(series - series.mean(), stats, qhat)
    taus = np.nonzero(stats.valid)[0] + w
    return taus, r[stats.valid]
