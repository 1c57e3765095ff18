"""corrcast: window-matching forecasts for time-series collections, median
ensembling, M4-style evaluation, and cross-correlation leakage audits."""

from .analysis import (
    GlobalMatch,
    LeakageReport,
    build_leakage_report,
    categorize,
    find_global_matches,
    future_use_stats,
    global_cross_correlation,
    overlap_histogram,
)
from .correlator import (
    CorrelatorMatch,
    CorrelatorParams,
    affine_map,
    candidate_stream,
    correlator_forecast,
    run_correlator,
    sweep_correlator,
)
from .dataset import (
    Dataset,
    HoldoutSplit,
    TimeSeries,
    attach_meta,
    holdout_split,
    load_m4_info,
    load_m4_values,
    read_forecast_csv,
    write_forecast_csv,
    write_values_csv,
)
from .ensemble import PipelineConfig, clip_negative, median_combine, naive_benchmark, pipeline_forecast
from .forecasters import (
    Decomposition,
    Forecast,
    custom_forecast,
    decompose_classical,
    linear_extrapolate,
    naive_forecast,
    ses_forecast,
)
from .metrics import MetricReport, UndefinedMetricError, mase, owa_report, smape
from .stats import ConstantInputError, RollingStats, pearson, rolling_stats, sliding_correlations

__version__ = "0.1.0"

__all__ = [
    "CorrelatorMatch",
    "CorrelatorParams",
    "ConstantInputError",
    "Dataset",
    "Decomposition",
    "Forecast",
    "GlobalMatch",
    "HoldoutSplit",
    "LeakageReport",
    "MetricReport",
    "PipelineConfig",
    "RollingStats",
    "TimeSeries",
    "UndefinedMetricError",
    "affine_map",
    "attach_meta",
    "build_leakage_report",
    "candidate_stream",
    "categorize",
    "clip_negative",
    "correlator_forecast",
    "custom_forecast",
    "decompose_classical",
    "find_global_matches",
    "future_use_stats",
    "global_cross_correlation",
    "holdout_split",
    "linear_extrapolate",
    "load_m4_info",
    "load_m4_values",
    "mase",
    "median_combine",
    "naive_benchmark",
    "naive_forecast",
    "overlap_histogram",
    "owa_report",
    "pearson",
    "pipeline_forecast",
    "read_forecast_csv",
    "rolling_stats",
    "run_correlator",
    "ses_forecast",
    "sliding_correlations",
    "smape",
    "sweep_correlator",
    "write_forecast_csv",
    "write_values_csv",
]
