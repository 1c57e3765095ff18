"""Correlation kernel tests, checked against direct per-window recomputation."""

import numpy as np
import pytest

from corrcast import ConstantInputError, pearson, rolling_stats, sliding_correlations


def direct_pearson(a, b):
    """Straight two-pass evaluation with population stds, no clamping."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a.size
    ma, mb = a.mean(), b.mean()
    num = float(np.sum((a - ma) * (b - mb)))
    sa = float(np.sqrt(np.sum((a - ma) ** 2) / n))
    sb = float(np.sqrt(np.sum((b - mb) ** 2) / n))
    return num / (n * sa * sb)


class TestPearson:
    def test_frozen_example(self):
        assert pearson([1, 2, 3, 5], [1, 2, 2, 4]) == pytest.approx(
            0.9694584179118515, abs=1e-12
        )

    def test_affine_invariance(self, rng):
        a = rng.normal(0, 1, 30)
        assert pearson(a, 2.0 * a + 3.0) == pytest.approx(1.0, abs=1e-12)

    def test_anticorrelation(self, rng):
        a = rng.normal(0, 1, 30)
        assert pearson(a, -a) == pytest.approx(-1.0, abs=1e-12)

    def test_matches_direct_formula(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 40))
            a = rng.normal(0, rng.uniform(0.1, 10), n)
            b = rng.normal(0, rng.uniform(0.1, 10), n)
            if np.std(a) == 0 or np.std(b) == 0:
                continue
            assert pearson(a, b) == pytest.approx(direct_pearson(a, b), abs=1e-9)

    def test_range_clamped(self, rng):
        for scale in (1.0, 1e6, 1e-6):
            a = rng.normal(0, 1, 14) * scale
            assert -1.0 <= pearson(a, 3.7 * a - 11.0) <= 1.0

    def test_constant_input_rejected(self):
        with pytest.raises(ConstantInputError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ConstantInputError):
            pearson([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])


class TestRollingStats:
    def test_hand_example(self):
        st = rolling_stats([1.0, 2.0, 3.0], 2)
        assert st.mean.tolist() == [1.5, 2.5]

    def test_constant_series_invalid(self):
        st = rolling_stats(np.full(10, 7.0), 3)
        assert np.all(st.std == 0.0)
        assert not st.valid.any()

    def test_matches_per_window_recomputation(self, rng):
        series = rng.normal(0, 1, 1000)
        w = 14
        st = rolling_stats(series, w)
        assert st.mean.size == series.size - w + 1
        for t in range(0, series.size - w + 1, 37):
            win = series[t : t + w]
            mu = sum(win) / w
            sd = (sum((x - mu) ** 2 for x in win) / w) ** 0.5
            assert st.mean[t] == pytest.approx(mu, rel=1e-9)
            assert st.std[t] == pytest.approx(sd, rel=1e-9)

    def test_large_offset_stability(self, rng):
        # Values near 1e9 with tiny local variation must not lose the std.
        series = 1e9 + rng.normal(0, 1, 500)
        st = rolling_stats(series, 14)
        for t in range(0, series.size - 13, 61):
            win = series[t : t + 14]
            mu = win.mean()
            sd = float(np.sqrt(np.mean((win - mu) ** 2)))
            assert st.std[t] == pytest.approx(sd, rel=1e-9)

    def test_too_short(self):
        with pytest.raises(ValueError):
            rolling_stats([1.0, 2.0], 3)


class TestSlidingCorrelations:
    def test_self_match_is_one(self, rng):
        series = rng.normal(0, 1, 120)
        w = 14
        query = series[40:54]
        taus, rs = sliding_correlations(query, series)
        hit = rs[taus.tolist().index(54)]
        assert hit == pytest.approx(1.0, abs=1e-12)

    def test_range(self, rng):
        series = rng.normal(0, 1, 200)
        _, rs = sliding_correlations(rng.normal(0, 1, 14), series)
        assert np.all(rs <= 1.0) and np.all(rs >= -1.0)

    def test_matches_per_shift_pearson(self, rng):
        series = rng.normal(0, 1, 300)
        query = rng.normal(0, 1, 14)
        taus, rs = sliding_correlations(query, series)
        for tau, r in zip(taus[::7], rs[::7]):
            assert r == pytest.approx(direct_pearson(query, series[tau - 14 : tau]), abs=1e-9)

    def test_affine_invariance_of_query(self, rng):
        series = rng.normal(0, 1, 200)
        query = rng.normal(0, 1, 14)
        taus0, rs0 = sliding_correlations(query, series)
        taus1, rs1 = sliding_correlations(0.3 * query + 7.0, series)
        assert np.array_equal(taus0, taus1)
        assert np.allclose(rs0, rs1, atol=1e-9)
        _, rs2 = sliding_correlations(-2.0 * query + 1.0, series)
        assert np.allclose(rs2, -rs0, atol=1e-9)

    def test_invalid_windows_omitted(self, rng):
        series = np.concatenate([rng.normal(0, 1, 30), np.full(20, 4.0), rng.normal(0, 1, 30)])
        w = 14
        taus, _ = sliding_correlations(rng.normal(0, 1, w), series)
        # Windows fully inside the flat stretch end at 1-based positions 44..50.
        flat = set(range(30 + w, 51))
        assert flat.isdisjoint(taus.tolist())

    def test_constant_query_rejected(self, rng):
        with pytest.raises(ConstantInputError):
            sliding_correlations(np.ones(14), rng.normal(0, 1, 100))

    def test_precomputed_stats_reused(self, rng):
        series = rng.normal(0, 1, 150)
        from corrcast import rolling_stats as rs_fn

        st = rs_fn(series, 14)
        query = rng.normal(0, 1, 14)
        taus0, rs0 = sliding_correlations(query, series, st)
        taus1, rs1 = sliding_correlations(query, series)
        assert np.array_equal(taus0, taus1)
        assert np.array_equal(rs0, rs1)
