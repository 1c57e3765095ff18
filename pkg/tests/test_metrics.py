"""Metric tests with direct-formula oracles and aggregation cross-checks."""

import numpy as np
import pytest

from corrcast import Dataset, HoldoutSplit, TimeSeries, UndefinedMetricError, mase, owa_report, smape


class TestMase:
    def test_perfect_forecast(self):
        assert mase([1.0, 2.0, 4.0], [5.0, 6.0], [5.0, 6.0]) == 0.0

    def test_frozen_example(self):
        assert mase([1.0, 2.0, 3.0], [4.0, 5.0], [3.0, 3.0], m=1) == pytest.approx(1.5, abs=1e-12)

    def test_constant_train_undefined(self):
        with pytest.raises(UndefinedMetricError):
            mase([2.0, 2.0, 2.0], [2.0], [3.0], m=1)

    def test_scale_invariance(self, rng):
        train = rng.normal(0, 1, 50)
        actual = rng.normal(0, 1, 14)
        forecast = rng.normal(0, 1, 14)
        base = mase(train, actual, forecast)
        for c in (3.0, 1e-4, 2.5e7):
            scaled = mase(c * train, c * actual, c * forecast)
            assert scaled == pytest.approx(base, rel=1e-12)

    def test_seasonal_lag(self):
        train = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0]
        # at m=2 the seasonal-naive in-sample error is 0 -> undefined
        with pytest.raises(UndefinedMetricError):
            mase(train, [1.0], [1.0], m=2)
        assert mase(train, [2.0], [1.0], m=1) == pytest.approx(1.0, abs=1e-12)


class TestSmape:
    def test_perfect(self):
        assert smape([3.0, 4.0], [3.0, 4.0]) == 0.0

    def test_frozen_example(self):
        assert smape([100.0], [110.0]) == pytest.approx(9.523809523809524, abs=1e-12)

    def test_both_zero_convention(self):
        assert smape([0.0], [0.0]) == 0.0
        assert smape([0.0, 5.0], [0.0, 5.0]) == 0.0

    def test_symmetry(self, rng):
        a = rng.normal(0, 5, 20)
        b = rng.normal(0, 5, 20)
        assert smape(a, b) == pytest.approx(smape(b, a), abs=1e-12)

    def test_range(self, rng):
        for _ in range(50):
            a = rng.normal(0, 10, 14)
            b = rng.normal(0, 10, 14)
            assert 0.0 <= smape(a, b) <= 200.0
        assert smape([1.0], [-1.0]) == pytest.approx(200.0)


def _split_from(train_map, test_map):
    d = Dataset([TimeSeries(sid, v) for sid, v in train_map.items()])
    return HoldoutSplit(train=d, test={k: np.asarray(v, float) for k, v in test_map.items()})


class TestOwaReport:
    def test_naive_vs_naive_is_exactly_one(self, rng):
        train = {f"A{i}": rng.normal(0, 1, 30) for i in range(4)}
        test = {sid: rng.normal(0, 1, 5) for sid in train}
        naive = {sid: np.full(5, train[sid][-1]) for sid in train}
        report = owa_report(naive, naive, _split_from(train, test))
        assert report.owa == 1.0
        assert report.relative_mase == 1.0
        assert report.relative_smape == 1.0

    def test_matches_spreadsheet_aggregation(self, rng):
        ids = ["A", "B", "C"]
        train = {sid: rng.uniform(1, 10, 25) for sid in ids}
        test = {sid: rng.uniform(1, 10, 4) for sid in ids}
        fcs = {sid: rng.uniform(1, 10, 4) for sid in ids}
        bench = {sid: np.full(4, train[sid][-1]) for sid in ids}
        report = owa_report(fcs, bench, _split_from(train, test))

        # Independent aggregation: per-series metrics then ratio of means.
        mase_f = [mase(train[sid], test[sid], fcs[sid]) for sid in ids]
        mase_b = [mase(train[sid], test[sid], bench[sid]) for sid in ids]
        smape_f = [smape(test[sid], fcs[sid]) for sid in ids]
        smape_b = [smape(test[sid], bench[sid]) for sid in ids]
        rel_mase = np.mean(mase_f) / np.mean(mase_b)
        rel_smape = np.mean(smape_f) / np.mean(smape_b)
        assert report.relative_mase == pytest.approx(rel_mase, rel=1e-12)
        assert report.relative_smape == pytest.approx(rel_smape, rel=1e-12)
        assert report.owa == pytest.approx((rel_mase + rel_smape) / 2, rel=1e-12)

    def test_id_order_irrelevant_to_aggregates(self, rng):
        ids = ["A", "B", "C", "D"]
        train = {sid: rng.uniform(1, 10, 25) for sid in ids}
        test = {sid: rng.uniform(1, 10, 4) for sid in ids}
        fcs = {sid: rng.uniform(1, 10, 4) for sid in ids}
        bench = {sid: np.full(4, train[sid][-1]) for sid in ids}
        split = _split_from(train, test)
        fwd = owa_report(fcs, bench, split)
        rev = owa_report(dict(reversed(fcs.items())), bench, split)
        assert fwd.owa == pytest.approx(rev.owa, rel=1e-12)

    def test_undefined_series_excluded_with_warning(self, rng):
        train = {"A": np.full(20, 5.0), "B": rng.normal(0, 1, 20)}
        test = {"A": np.full(3, 5.0), "B": rng.normal(0, 1, 3)}
        fcs = {"A": np.full(3, 5.0), "B": rng.normal(0, 1, 3)}
        bench = {sid: np.full(3, train[sid][-1]) for sid in train}
        with pytest.warns(UserWarning, match="excluded"):
            report = owa_report(fcs, bench, _split_from(train, test))
        assert report.per_series["A"][0] is None
        assert report.excluded == ["A"]

    def test_empty_rejected(self, rng):
        split = _split_from({"A": rng.normal(0, 1, 10)}, {"A": rng.normal(0, 1, 2)})
        with pytest.raises(ValueError):
            owa_report({}, {}, split)

    def test_missing_benchmark_id_rejected(self, rng):
        train = {"A": rng.normal(0, 1, 20)}
        test = {"A": rng.normal(0, 1, 3)}
        with pytest.raises(ValueError, match="A"):
            owa_report({"A": np.zeros(3)}, {}, _split_from(train, test))
