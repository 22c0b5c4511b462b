"""Three-state drift detector: bounds, schedules, cut search, verdicts."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsscn.drift import (DRIFT, STABLE, WARNING, DriftConfig, DriftDetector,
                         UndefinedBoundError, detect, find_cut, hoeffding_bound,
                         significance_schedule, two_sample_bound)


class TestHoeffdingBound:
    def test_pinned_value(self):
        # evaluated independently: sqrt(ln(1/0.09) / 1000)
        assert hoeffding_bound(0.0, 1.0, 1000, 500, 0.09) == pytest.approx(
            0.04907, abs=1e-5)

    def test_zero_range(self):
        assert hoeffding_bound(2.0, 2.0, 100, 50, 0.05) == 0.0

    def test_alpha_near_one_vanishes(self):
        assert hoeffding_bound(0.0, 1.0, 100, 50, 1 - 1e-12) == pytest.approx(
            0.0, abs=1e-5)

    def test_bad_alpha(self):
        with pytest.raises(UndefinedBoundError):
            hoeffding_bound(0.0, 1.0, 100, 50, 0.0)
        with pytest.raises(UndefinedBoundError):
            hoeffding_bound(0.0, 1.0, 100, 50, 1.0)

    def test_bad_cut(self):
        with pytest.raises(ValueError):
            hoeffding_bound(0.0, 1.0, 100, 0, 0.05)
        with pytest.raises(ValueError):
            hoeffding_bound(0.0, 1.0, 100, 100, 0.05)

    @given(st.integers(1, 998), st.integers(2, 999))
    @settings(max_examples=60, deadline=None)
    def test_monotone_decreasing_in_cut(self, c1, c2):
        c1, c2 = sorted({c1, min(c2, 999)})[0], max(c1, min(c2, 999))
        if c1 == c2:
            return
        e1 = hoeffding_bound(0.0, 1.0, 1000, c1, 0.05)
        e2 = hoeffding_bound(0.0, 1.0, 1000, c2, 0.05)
        assert e1 > e2


class TestTwoSampleBound:
    def test_symmetric_in_partition(self):
        assert two_sample_bound(0, 1, 100, 400, 0.05) == pytest.approx(
            two_sample_bound(0, 1, 400, 100, 0.05))

    def test_formula(self):
        got = two_sample_bound(0.0, 2.0, 50, 150, 0.1)
        want = 2.0 * math.sqrt((50 + 150) / (2.0 * 50 * 150) * math.log(10.0))
        assert got == pytest.approx(want, abs=1e-12)


class TestSchedule:
    def test_zero_time(self):
        assert significance_schedule(0.0, DriftConfig()) == (0.0, 0.0)

    def test_caps_reached(self):
        cfg = DriftConfig(tau=1000.0)
        a_d, a_w = significance_schedule(1e9, cfg)
        assert a_d == pytest.approx(0.09)
        assert a_w == pytest.approx(0.1)

    def test_at_tau_already_capped(self):
        cfg = DriftConfig(tau=1000.0)
        assert significance_schedule(1000.0, cfg) == (0.09, 0.1)

    def test_monotone(self):
        cfg = DriftConfig(tau=100000.0)
        prev = (0.0, 0.0)
        for t in np.linspace(0, 50000, 20):
            cur = significance_schedule(float(t), cfg)
            assert cur[0] >= prev[0] and cur[1] >= prev[1]
            prev = cur

    def test_config_ordering_enforced(self):
        with pytest.raises(ValueError):
            DriftConfig(alpha_min_drift=0.2, alpha_min_warning=0.1)


class TestFindCut:
    def test_step_series_cut_near_jump(self):
        series = np.concatenate([np.full(100, 0.1), np.full(100, 0.9)])
        cut = find_cut(series, 0.09)
        assert cut is not None and cut <= 100

    def test_constant_series_no_cut(self):
        assert find_cut(np.full(50, 0.3), 0.09) is None

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            find_cut(np.array([1.0]), 0.09)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            find_cut(np.array([0.0, np.nan, 1.0]), 0.09)

    def test_zero_alpha_no_cut(self):
        series = np.array([0.0, 1.0, 0.0, 1.0])
        assert find_cut(series, 0.0) is None


class TestDetect:
    CFG = DriftConfig(tau=50_000.0)

    def test_jump_is_drift(self):
        rng = np.random.default_rng(0)
        series = np.concatenate([
            (rng.random(5000) < 0.1).astype(float),
            (rng.random(5000) < 0.5).astype(float)])
        v = detect(series, 1e6, self.CFG)
        assert v.status == DRIFT
        assert v.dist >= v.eps_drift
        assert abs(v.cut - 5000) < 1500

    def test_warm_up_forces_stable(self):
        series = np.concatenate([np.zeros(10), np.ones(10)])
        v = detect(series, 0.0, self.CFG)
        assert v.status == STABLE

    def test_zero_range_stable(self):
        v = detect(np.full(100, 0.25), 1e6, self.CFG)
        assert v.status == STABLE
        assert v.cut is None

    def test_warning_band(self):
        # dist placed between the warning and drift bounds must yield WARNING
        rng = np.random.default_rng(7)
        base = (rng.random(20000) < 0.1).astype(float)
        found = None
        for bump in np.linspace(0.0, 0.08, 200):
            tail = (rng.random(2000) < 0.1 + bump).astype(float)
            v = detect(np.concatenate([base, tail]), 1e6, self.CFG)
            if v.status == WARNING:
                found = v
                break
        assert found is not None
        assert found.eps_warning <= found.dist < found.eps_drift

    def test_warning_bound_below_drift_bound(self):
        rng = np.random.default_rng(1)
        series = (rng.random(2000) < 0.3).astype(float)
        v = detect(series, 1e6, self.CFG)
        if v.cut is not None:
            assert v.eps_warning < v.eps_drift

    def test_pure_replay(self):
        rng = np.random.default_rng(2)
        series = rng.random(3000)
        v1 = detect(series, 12345.0, self.CFG)
        v2 = detect(series, 12345.0, self.CFG)
        assert v1 == v2

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            detect(np.array([0.0, np.nan]), 1e6, self.CFG)


class TestDetectorState:
    def test_window_accumulates(self):
        det = DriftDetector(cfg=DriftConfig(tau=1000.0))
        det.step(np.zeros(100))
        det.step(np.zeros(100))
        assert det.samples_seen == 200
        assert sum(len(w) for w in det.window) == 200

    def test_window_resets_on_drift(self):
        det = DriftDetector(cfg=DriftConfig(tau=100.0))
        rng = np.random.default_rng(0)
        det.step((rng.random(5000) < 0.1).astype(float))
        v = det.step((rng.random(5000) < 0.6).astype(float))
        assert v.status == DRIFT
        assert det.window == []
        assert det.samples_seen == 10000

    def test_manual_reset(self):
        det = DriftDetector()
        det.step(np.zeros(10))
        det.reset_window()
        assert det.window == []
