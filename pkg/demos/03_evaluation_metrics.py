"""A tour of the evaluation metrics: what MASE and sMAPE reward, and how
the overall weighted average (OWA) relates a method to the naive benchmark.
"""

import numpy as np

from corrcast import mase, smape

rng = np.random.default_rng(5)

train = np.abs(rng.normal(100, 10, 60)).cumsum() / 10
actual = train[-1] + np.cumsum(rng.normal(0.5, 1.0, 14))

naive = np.full(14, train[-1])
drifted = train[-1] + 0.5 * np.arange(1, 15)
noisy = actual + rng.normal(0, 3.0, 14)

print(f"{'forecast':10s} {'MASE':>8s} {'sMAPE':>8s}")
for name, fc in (("naive", naive), ("drift", drifted), ("noisy", noisy)):
    print(f"{name:10s} {mase(train, actual, fc):8.4f} {smape(actual, fc):8.4f}")

# MASE is scale-free: rescaling the whole problem changes nothing.
c = 1000.0
print(f"\nMASE at 1000x scale: {mase(c * train, c * actual, c * drifted):.6f} "
      f"(same as {mase(train, actual, drifted):.6f})")

# sMAPE is symmetric in its arguments and bounded by 200.
a, b = np.array([100.0]), np.array([300.0])
print(f"sMAPE(a, b) = sMAPE(b, a) = {smape(a, b):.2f}")
print(f"opposite signs hit the 200 ceiling: {smape([50.0], [-50.0]):.1f}")

# OWA: mean of the two relative metrics; < 1 beats naive.
rel_mase = mase(train, actual, drifted) / mase(train, actual, naive)
rel_smape = smape(actual, drifted) / smape(actual, naive)
print(f"\ndrift forecast OWA vs naive: {(rel_mase + rel_smape) / 2:.4f}")
