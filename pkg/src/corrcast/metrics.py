"""Forecast accuracy metrics: MASE, sMAPE, and the overall weighted average
of their values relative to a naive benchmark.

Aggregation follows the M4 convention: metrics are averaged over series
first, and the relative metrics are ratios of those averages (not averages
of per-series ratios).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dataset import HoldoutSplit

# Seasonal-naive lag per frequency group, per the M4 evaluation setup.
DEFAULT_SEASONALITY = {
    "Hourly": 24,
    "Daily": 1,
    "Weekly": 1,
    "Monthly": 12,
    "Quarterly": 4,
    "Yearly": 1,
}


class UndefinedMetricError(ValueError):
    """MASE is undefined: the in-sample seasonal-naive error is zero."""


def mase(train, actual, forecast, m: int = 1) -> float:
    """Mean absolute scaled error.

    The scale is the in-sample mean absolute error of the m-step
    seasonal-naive forecast over the training values. A constant-at-lag-m
    training series makes the metric undefined.
    """
    train = np.asarray(train, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    forecast = np.asarray(forecast, dtype=np.float64)
    if m < 1:
        raise ValueError(f"seasonality must be >= 1, got {m}")
    if train.size <= m:
        raise ValueError(f"training series of length {train.size} too short for m={m}")
    if actual.shape != forecast.shape:
        raise ValueError("actual and forecast lengths differ")
    scale = np.mean(np.abs(train[m:] - train[:-m]))
    if scale <= 0.0:
        raise UndefinedMetricError(
            f"in-sample seasonal-naive error is zero at lag {m}; MASE undefined"
        )
    return float(np.mean(np.abs(actual - forecast)) / scale)


def smape(actual, forecast) -> float:
    """Symmetric mean absolute percentage error, in percent (range [0, 200]).

    Points where actual and forecast are both zero contribute 0.
    """
    actual = np.asarray(actual, dtype=np.float64)
    forecast = np.asarray(forecast, dtype=np.float64)
    if actual.shape != forecast.shape:
        raise ValueError("actual and forecast lengths differ")
    denom = np.abs(actual) + np.abs(forecast)
    terms = np.zeros_like(denom)
    nz = denom > 0.0
    terms[nz] = np.abs(actual[nz] - forecast[nz]) / denom[nz]
    return float(200.0 * terms.mean())


@dataclass
class MetricReport:
    """Per-series and aggregate metrics against a benchmark forecast.

    ``per_series`` maps id -> (mase, smape); a None mase marks a series
    where the metric is undefined and excluded from the aggregates.
    """

    per_series: dict[str, tuple[float | None, float]]
    aggregate_mase: float
    aggregate_smape: float
    benchmark_mase: float
    benchmark_smape: float
    relative_mase: float
    relative_smape: float
    owa: float
    excluded: list[str] = field(default_factory=list)


def _values_of(entry) -> np.ndarray:
    # Accept bare arrays as well as Forecast records.
    return np.asarray(getattr(entry, "values", entry), dtype=np.float64)


def owa_report(
    forecasts: Mapping[str, object],
    benchmark: Mapping[str, object],
    split: HoldoutSplit,
    m: int = 1,
) -> MetricReport:
    """Score forecasts against held-out actuals, relative to a benchmark.

    ``split`` supplies the training values (for the MASE scale) and the
    actuals. The benchmark must cover every forecast id. Aggregates are
    means over series; series with undefined MASE are excluded from both
    MASE means with a warning. OWA is the mean of the relative MASE and
    relative sMAPE.
    """
    ids = list(forecasts)
    if not ids:
        raise ValueError("no series to evaluate")
    missing = [
        sid for sid in ids
        if sid not in benchmark or sid not in split.train or sid not in split.test
    ]
    if missing:
        raise ValueError(f"missing benchmark/train/actual values for ids: {missing}")

    per_series: dict[str, tuple[float | None, float]] = {}
    excluded: list[str] = []
    mase_f, mase_b, smape_f, smape_b = [], [], [], []
    for sid in ids:
        fc = _values_of(forecasts[sid])
        bench = _values_of(benchmark[sid])
        train = split.train[sid].values
        actual = split.test[sid]
        s_f = smape(actual, fc)
        s_b = smape(actual, bench)
        smape_f.append(s_f)
        smape_b.append(s_b)
        try:
            m_f = mase(train, actual, fc, m=m)
            m_b = mase(train, actual, bench, m=m)
        except UndefinedMetricError:
            per_series[sid] = (None, s_f)
            excluded.append(sid)
            continue
        per_series[sid] = (m_f, s_f)
        mase_f.append(m_f)
        mase_b.append(m_b)

    if excluded:
        warnings.warn(
            f"MASE undefined for {len(excluded)} series (constant training data); "
            f"excluded from MASE aggregation: {excluded[:5]}"
        )
    if not mase_f:
        raise UndefinedMetricError("MASE undefined for every series; cannot aggregate")

    agg_mase = float(np.mean(mase_f))
    agg_smape = float(np.mean(smape_f))
    bench_mase = float(np.mean(mase_b))
    bench_smape = float(np.mean(smape_b))
    if bench_mase <= 0.0 or bench_smape <= 0.0:
        raise UndefinedMetricError("benchmark aggregate metric is zero; relative metrics undefined")
    rel_mase = agg_mase / bench_mase
    rel_smape = agg_smape / bench_smape
    return MetricReport(
        per_series=per_series,
        aggregate_mase=agg_mase,
        aggregate_smape=agg_smape,
        benchmark_mase=bench_mase,
        benchmark_smape=bench_smape,
        relative_mase=rel_mase,
        relative_smape=rel_smape,
        owa=(rel_mase + rel_smape) / 2.0,
        excluded=excluded,
    )
