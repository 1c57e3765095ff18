"""Window-matching forecaster: find the non-terminal window anywhere in the
dataset that correlates best with a target's final window, map the matched
window's continuation into the target's scale, and accept it subject to a
correlation threshold and a dispersion cap.

Candidates are ranked by correlation (ties: source position, then window
position) and walked in order; a candidate whose mapped forecast is too
dispersed is skipped and the next-best distinct (source, position) pair is
tried, until one is accepted or the stream is exhausted.

Two historical defects of the original submission are reproducible behind
flags: ``bug1`` disables the method for every series past file position
2138, and ``bug2`` compares the forecast dispersion against the matched
source window instead of the target's final window.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ._parallel import indexed_map
from .dataset import Dataset
from .stats import RollingStats, _normalized_query, _std_floor, _window_correlations, rolling_stats

# 1-based file position of the last series the bug1 submission variant
# still processed.
BUG1_CUTOFF = 2138


@dataclass(frozen=True)
class CorrelatorParams:
    """Scan configuration.

    ``std_ratio`` of None disables the dispersion condition entirely.
    ``past_only`` skips candidates that would consume values dated on or
    after the target's first forecast date (requires start dates).
    ``include_self`` controls whether a target's own non-terminal windows
    are eligible sources.
    """

    w: int = 14
    r_threshold: float = 0.9999
    std_ratio: float | None = 2.5
    bug1: bool = False
    bug2: bool = False
    past_only: bool = False
    include_self: bool = True

    def __post_init__(self):
        if self.w < 2:
            raise ValueError(f"window length must be >= 2, got {self.w}")
        if not 0.0 < self.r_threshold <= 1.0:
            raise ValueError(f"r_threshold must be in (0, 1], got {self.r_threshold}")
        if self.std_ratio is not None and self.std_ratio <= 0.0:
            raise ValueError(f"std_ratio must be positive, got {self.std_ratio}")


@dataclass(frozen=True)
class CorrelatorMatch:
    """An accepted match: source window end ``tau`` (1-based index of the
    window's last element, so the window is values[tau-w:tau] and its
    continuation values[tau:tau+w]) plus the mapped forecast."""

    target_id: str
    source_id: str
    tau: int
    r: float
    forecast: np.ndarray
    used_future: bool | None = None
    source_date_range: tuple[date, date] | None = None


def affine_map(source_values, source_mean: float, source_std: float,
               target_mean: float, target_std: float) -> np.ndarray:
    """Scale-and-translate values from the source window's frame to the
    target window's: x -> (x - source_mean) * (target_std / source_std)
    + target_mean."""
    if source_std <= 0.0:
        raise ValueError(f"source window std must be positive, got {source_std}")
    source_values = np.asarray(source_values, dtype=np.float64)
    return (source_values - source_mean) * (target_std / source_std) + target_mean


def match_uses_future(source_start: date | None, tau: int, w: int,
                      target_start: date | None, target_len: int) -> bool | None:
    """Whether a match consumes any value dated on/after the target's first
    forecast date. The consumed span is the matched window plus its
    continuation, positions tau-w .. tau+w-1 (0-based) of the source.
    Returns None when either start date is missing."""
    if source_start is None or target_start is None:
        return None
    last_consumed = source_start.toordinal() + (tau + w - 1)
    first_forecast = target_start.toordinal() + target_len
    return last_consumed >= first_forecast


class CorrelationEngine:
    """Shared scan state: per-series centered values and window statistics.

    Build once per (dataset, window length); individual targets can then be
    scanned independently, which is what the parallel runner exploits.
    """

    def __init__(self, dataset: Dataset, params: CorrelatorParams):
        self.dataset = dataset
        self.params = params
        w = params.w
        self.centered: list[np.ndarray | None] = []
        self.stats: list[RollingStats | None] = []
        start_ords = []
        for ts in dataset:
            # Only series with at least one non-terminal window can be sources.
            if len(ts) >= 2 * w:
                self.centered.append(ts.values - ts.values.mean())
                self.stats.append(rolling_stats(ts.values, w))
            else:
                self.centered.append(None)
                self.stats.append(None)
            start_ords.append(
                float(ts.start_date.toordinal()) if ts.start_date is not None else np.nan
            )
        self.start_ords = np.array(start_ords, dtype=np.float64)

    def _tail_stats(self, j: int) -> tuple[np.ndarray, float, float] | None:
        """Target's final window with its mean/std; None when degenerate."""
        ts = self.dataset.series[j]
        w = self.params.w
        if len(ts) < w:
            return None
        tail = ts.values[-w:]
        mean = tail.mean()
        dev = tail - mean
        std = np.sqrt(np.dot(dev, dev) / w)
        if std <= _std_floor(mean):
            return None
        return tail, float(mean), float(std)

    def _scan(self, j: int, r_threshold: float):
        """All candidates with r >= threshold over valid non-terminal windows,
        as parallel arrays (ks, taus, rs, win_std, cont_std) in (k, tau)
        ascending order."""
        w = self.params.w
        tail_info = self._tail_stats(j)
        empty = tuple(np.empty(0, dt) for dt in (np.int64, np.int64, np.float64,
                                                 np.float64, np.float64))
        if tail_info is None:
            return empty
        tail, _, _ = tail_info
        qhat = _normalized_query(tail)
        parts = []
        for k, (centered, st) in enumerate(zip(self.centered, self.stats)):
            if st is None:
                continue
            if not self.params.include_self and k == j:
                continue
            n_k = centered.size
            r = _window_correlations(centered, st, qhat)
            # Keep non-terminal windows only: tau <= n_k - w.
            r = r[: n_k - 2 * w + 1]
            hit = np.nonzero(r >= r_threshold)[0]
            if hit.size:
                taus = hit + w
                parts.append((
                    np.full(hit.size, k, dtype=np.int64),
                    taus,
                    r[hit],
                    st.std[hit],        # matched window: starts at tau - w
                    st.std[taus],       # continuation window: starts at tau
                ))
        if not parts:
            return empty
        return tuple(np.concatenate(cols) for cols in zip(*parts))

    def candidates(self, j: int, r_threshold: float | None = None):
        """(ks, taus, rs) arrays of all candidates for one target, sorted by
        r descending with ties broken by (k, tau) ascending."""
        if r_threshold is None:
            r_threshold = self.params.r_threshold
        ks, taus, rs, _, _ = self._scan(j, r_threshold)
        order = np.lexsort((taus, ks, -rs))
        return ks[order], taus[order], rs[order]

    def _walk(self, j: int, cands, r_threshold: float, std_ratio: float | None):
        """Best-ranked candidate that passes every acceptance condition.

        Walking candidates in descending-r order and accepting the first one
        that satisfies the per-candidate conditions selects the same match
        as a masked argmax, which avoids sorting dense candidate sets; ties
        resolve to the smallest (k, tau) because the scan emits candidates
        in that order and argmax returns the first maximum.
        """
        tail_info = self._tail_stats(j)
        if tail_info is None:
            return None
        _, tail_mean, tail_std = tail_info
        target = self.dataset.series[j]
        w = self.params.w
        ks, taus, rs, win_std, cont_std = cands

        keep = rs >= r_threshold
        if self.params.past_only:
            # Skip candidates whose consumed span reaches the forecast dates;
            # NaN ordinals (missing dates) compare False and are kept.
            first_forecast = self.start_ords[j] + len(target)
            keep &= ~(self.start_ords[ks] + (taus + w - 1) >= first_forecast)
        if std_ratio is not None:
            # The mapped forecast's std is the affine slope times the
            # continuation's std, both already in the rolling stats.
            fc_std = (tail_std / win_std) * cont_std
            limit = std_ratio * (win_std if self.params.bug2 else tail_std)
            keep &= fc_std <= limit
        if not keep.any():
            return None
        masked = np.where(keep, rs, -np.inf)
        pick = int(np.argmax(masked))
        k = int(ks[pick])
        tau = int(taus[pick])
        source = self.dataset.series[k]
        st = self.stats[k]
        forecast = affine_map(source.values[tau : tau + w], float(st.mean[tau - w]),
                              float(st.std[tau - w]), tail_mean, tail_std)
        dates = None
        if source.start_date is not None:
            dates = (source.date_of(tau - w), source.date_of(tau + w - 1))
        return CorrelatorMatch(
            target_id=target.id,
            source_id=source.id,
            tau=tau,
            r=float(rs[pick]),
            forecast=forecast,
            used_future=match_uses_future(source.start_date, tau, w,
                                          target.start_date, len(target)),
            source_date_range=dates,
        )

    def forecast(self, j: int) -> CorrelatorMatch | None:
        if self.params.bug1 and j + 1 > BUG1_CUTOFF:
            return None
        cands = self._scan(j, self.params.r_threshold)
        return self._walk(j, cands, self.params.r_threshold, self.params.std_ratio)

    def sweep(self, j: int, combos) -> list[CorrelatorMatch | None]:
        """Acceptance outcome of each (r_threshold, std_ratio) combo for one
        target, reusing a single candidate scan at the loosest threshold."""
        if self.params.bug1 and j + 1 > BUG1_CUTOFF:
            return [None] * len(combos)
        min_r = min(r for r, _ in combos)
        cands = self._scan(j, min_r)
        return [self._walk(j, cands, r, s) for r, s in combos]


def candidate_stream(j: int, dataset: Dataset, params: CorrelatorParams) -> list[tuple[int, int, float]]:
    """Ordered candidate matches for one target: (source index, tau, r)."""
    ks, taus, rs = CorrelationEngine(dataset, params).candidates(j)
    return [(int(k), int(t), float(r)) for k, t, r in zip(ks, taus, rs)]


def correlator_forecast(j: int, dataset: Dataset, params: CorrelatorParams) -> CorrelatorMatch | None:
    """Best accepted match for one target, or None (a normal outcome)."""
    return CorrelationEngine(dataset, params).forecast(j)


def run_correlator(dataset: Dataset, params: CorrelatorParams,
                   threads: int = 1) -> dict[str, CorrelatorMatch]:
    """Apply the correlator to every series; map of id -> accepted match.

    The result is assembled in dataset order and is identical for any
    thread count.
    """
    engine = CorrelationEngine(dataset, params)
    results = indexed_map(engine.forecast, len(dataset), threads)
    return {ts.id: m for ts, m in zip(dataset, results) if m is not None}


def sweep_correlator(dataset: Dataset, combos, params: CorrelatorParams,
                     threads: int = 1) -> list[dict[str, CorrelatorMatch]]:
    """Run every (r_threshold, std_ratio) combo over the dataset with one
    shared window scan. Returns one id -> match map per combo, in order."""
    combos = list(combos)
    if not combos:
        raise ValueError("empty parameter grid")
    engine = CorrelationEngine(dataset, params)
    per_target = indexed_map(lambda j: engine.sweep(j, combos), len(dataset), threads)
    out = []
    for c, _ in enumerate(combos):
        out.append(
            {ts.id: row[c] for ts, row in zip(dataset, per_target) if row[c] is not None}
        )
    return out


def write_matches_csv(matches: Mapping[str, CorrelatorMatch] | Iterable[CorrelatorMatch],
                      path: str | Path) -> None:
    """Write accepted matches as ``target_id,source_id,tau,r,used_future``."""
    if isinstance(matches, Mapping):
        matches = matches.values()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target_id", "source_id", "tau", "r", "used_future"])
        for m in matches:
            flag = "" if m.used_future is None else str(m.used_future).lower()
            writer.writerow([m.target_id, m.source_id, m.tau, repr(m.r), flag])
