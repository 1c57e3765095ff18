"""Reference run on the public M4 Daily dataset, when the files are present.

Download Daily-train.csv, Daily-test.csv and M4-info.csv from the M4
competition repository into ./data (or point M4_DATA_DIR there), then run
this script. Reference values for the default parameters:

  accepted matches at (0.9999, std 2.5):   ~518 of 4227 series
  at (0.999, 2.5):                         ~794
  at (0.99, 2.5):                          ~1772
  accepted-subset OWA at (0.9999, 2.5):    ~0.092
  audit matches at r' >= 0.995:            ~1083 before manual exclusions

The same run is available via the CLI:
  corrcast sweep --data data/Daily-train.csv --test data/Daily-test.csv \
      --out out_sweep --threads 8
  corrcast audit --data data/Daily-train.csv --info data/M4-info.csv \
      --out out_audit --threads 8
"""

import os
import sys
import time
from pathlib import Path

import numpy as np

from corrcast import (
    CorrelatorParams,
    HoldoutSplit,
    attach_meta,
    load_m4_info,
    load_m4_values,
    naive_forecast,
    owa_report,
    read_forecast_csv,
    sweep_correlator,
)

data_dir = Path(os.environ.get("M4_DATA_DIR", "data"))
train_path = data_dir / "Daily-train.csv"
test_path = data_dir / "Daily-test.csv"
info_path = data_dir / "M4-info.csv"
threads = int(os.environ.get("M4_THREADS", os.cpu_count() or 1))

if not train_path.exists() or not test_path.exists():
    print(f"M4 Daily files not found under {data_dir}/ - see the module docstring.")
    sys.exit(0)

print("loading...")
dataset = load_m4_values(train_path)
if info_path.exists():
    dataset = attach_meta(dataset, load_m4_info(info_path))
test = read_forecast_csv(test_path)
print(f"{len(dataset)} series, {sum(len(ts) for ts in dataset)} observations")

combos = [(0.9999, 2.5), (0.999, 2.5), (0.99, 2.5)]
start = time.monotonic()
results = sweep_correlator(dataset, combos, CorrelatorParams(), threads=threads)
print(f"scan took {time.monotonic() - start:.0f}s on {threads} threads")

split = HoldoutSplit(train=dataset, test=test)
for (r, s), matches in zip(combos, results):
    forecasts = {sid: np.maximum(m.forecast[: len(test[sid])], 0.0)
                 for sid, m in matches.items()}
    benchmark = {sid: naive_forecast(dataset[sid].values, len(test[sid]))
                 for sid in forecasts}
    report = owa_report(forecasts, benchmark, split)
    print(f"threshold {r:<7} std {s}: accepted {len(matches):5d} "
          f"({100 * len(matches) / len(dataset):.1f}%)  "
          f"MASE {report.aggregate_mase:.3f}  sMAPE {report.aggregate_smape:.3f}  "
          f"OWA {report.owa:.3f}")
