"""How the acceptance thresholds trade coverage for confidence.

Plants matches of graded quality (varying copy noise and continuation
dispersion), then sweeps the correlation threshold and the dispersion cap.
Accepted counts relax monotonically along both axes; all combinations
share a single window scan.
"""

import numpy as np

from corrcast import CorrelatorParams, Dataset, TimeSeries, sweep_correlator

rng = np.random.default_rng(31)
W = 14

series = []
for i in range(12):
    target = rng.normal(0, 1, 50)
    tail = target[-W:]
    noise = [0.0, 0.002, 0.01, 0.05][i % 4]
    window = 1.2 * tail + noise * rng.normal(0, 1, W)
    z = rng.normal(0, 1, W)
    z = (z - z.mean()) / np.std(z)
    spread = [0.8, 1.8, 2.8, 3.8][i // 4 % 4]
    cont = window.mean() + spread * np.std(window) * z
    host = np.concatenate([rng.normal(0, 1, 16), window, cont, rng.normal(0, 1, 6)])
    series += [TimeSeries(f"T{i}", target), TimeSeries(f"H{i}", host)]

dataset = Dataset(series)

r_grid = (0.9999, 0.999, 0.99)
std_grid = (2.0, 2.5, 3.0, None)
combos = [(r, s) for r in r_grid for s in std_grid]
results = sweep_correlator(dataset, combos, CorrelatorParams())

print(f"{'r threshold':>12s} | " + " | ".join(f"std {s or '-':>4}" for s in std_grid))
for i, r in enumerate(r_grid):
    row = results[i * len(std_grid):(i + 1) * len(std_grid)]
    print(f"{r:>12} | " + " | ".join(f"{len(m):8d}" for m in row))
print("\n(accepted counts; every row and column is non-decreasing)")
