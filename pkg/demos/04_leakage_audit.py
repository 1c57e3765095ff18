"""Dataset audit: global cross-correlations between whole overlapping
regions, the best alignment per series, and the leakage taxonomy.

The synthetic dataset reproduces each suspicious pattern the audit is
built to catch: a series repeating its own beginning (T1), two series that
are rearrangements of each other (T2), an extended copy on identical dates
(T3), and a shifted copy whose claimed dates cannot both be right (T4).
"""

from datetime import date

import numpy as np

from corrcast import Dataset, TimeSeries, build_leakage_report

rng = np.random.default_rng(17)
start = date(2000, 1, 1)

# T1: the last 25 points repeat the first 25.
s = rng.normal(0, 1, 80)
s[-25:] = s[:25]

# T2: A = [x | y], B = [y | x] — each ends with the other's beginning.
x, y = rng.normal(0, 1, 40), rng.normal(0, 1, 45)
a2 = np.concatenate([x, y])
b2 = np.concatenate([y, x])

# T3: D extends C by two weeks; both claim the same start date, so the
# overlapping region covers identical calendar dates.
c3 = rng.normal(0, 1, 70)
d3 = np.concatenate([c3, rng.normal(0, 1, 14)])

# T4: F is E shifted by 10 days but claims the same start date.
base = rng.normal(0, 1, 100)
e4, f4 = base[:76], base[10:]

dataset = Dataset([
    TimeSeries("SELF", s, start_date=start),
    TimeSeries("A", a2, start_date=start),
    TimeSeries("B", b2, start_date=start),
    TimeSeries("C", c3, start_date=start),
    TimeSeries("D", d3, start_date=start),
    TimeSeries("E", e4, start_date=start),
    TimeSeries("F", f4, start_date=start),
])

report = build_leakage_report(dataset, threshold=0.99, bin_width=25)
print(f"matches at r' >= 0.99: {len(report.set_c)}")
for m in report.set_c:
    print(f"  {m.target_id:4s} <- {m.source_id:4s}  tau={m.tau:3d}  "
          f"overlap={m.overlap:3d}  r'={m.r_prime:.4f}")

print("\ncategories:")
for label, entries in report.categories.items():
    if entries:
        print(f"  {label}: {[m.target_id for m in entries]}")

print("\noverlap histogram (bin width 25):")
for i, count in enumerate(report.histogram):
    if count:
        print(f"  [{25 * i:3d}, {25 * (i + 1):3d}): {'#' * int(count)}")
