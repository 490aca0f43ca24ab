import math

import numpy as np
import pytest

from cifpoint.data import build_event_table
from cifpoint.errors import SeparationDetected
from cifpoint.estimation import cif_estimate
from cifpoint.pseudo import LinkKind, gee_fit, pseudo_test, pseudo_values

from conftest import make_dataset, random_dataset

TOL = 1e-12


class TestPseudoValues:
    def test_fixture_thetas(self, dataset_a):
        # hand jackknife of the pooled CIF at tau=3: the full-sample
        # estimate is 7/15 and the five leave-one-out values are
        # 1/3, 1/2, 1/4, 5/8, 5/8
        pv = pseudo_values(dataset_a, 1, [3.0])
        expected = [1.0, 1 / 3, 4 / 3, -1 / 6, -1 / 6]
        assert np.allclose(pv.values[:, 0], expected, rtol=0, atol=TOL)

    def test_no_censoring_gives_indicators(self):
        rng = np.random.default_rng(5)
        t = rng.exponential(1.0, size=80)
        cause = rng.integers(1, 3, size=80)
        data = make_dataset(t, cause)
        for tau in [0.3, 1.0]:
            pv = pseudo_values(data, 1, [tau])
            indicator = ((t <= tau) & (cause == 1)).astype(float)
            assert np.allclose(pv.values[:, 0], indicator, rtol=0, atol=TOL)

    def test_multiple_horizons_columns(self, dataset_a):
        pv = pseudo_values(dataset_a, 1, [1.0, 3.0])
        assert pv.values.shape == (5, 2)
        single = pseudo_values(dataset_a, 1, [1.0])
        assert np.array_equal(pv.values[:, 0], single.values[:, 0])

    def test_chunk_independence(self):
        rng = np.random.default_rng(9)
        data = random_dataset(rng, 101, groups=("g",))
        a = pseudo_values(data, 1, [0.5, 1.0], chunk=7)
        b = pseudo_values(data, 1, [0.5, 1.0], chunk=1024)
        assert np.array_equal(a.values, b.values)

    def test_rows_align_with_records(self, dataset_a):
        pv = pseudo_values(dataset_a, 1, [3.0])
        perm = [2, 0, 4, 1, 3]
        shuffled = make_dataset(
            [dataset_a.records[i].time for i in perm],
            [dataset_a.records[i].status for i in perm],
        )
        pv2 = pseudo_values(shuffled, 1, [3.0])
        assert np.allclose(pv2.values[:, 0], pv.values[perm, 0], rtol=0, atol=TOL)

    def test_times_validation(self, dataset_a):
        with pytest.raises(ValueError):
            pseudo_values(dataset_a, 1, [])
        with pytest.raises(ValueError):
            pseudo_values(dataset_a, 1, [2.0, 1.0])
        with pytest.raises(ValueError):
            pseudo_values(dataset_a, 1, [0.0])

    def test_mean_is_estimate_when_uncensored(self):
        # with no censoring the pseudo-values are indicators, so their
        # mean is the empirical (= Aalen-Johansen) incidence
        rng = np.random.default_rng(13)
        t = rng.exponential(1.0, size=60)
        cause = rng.integers(1, 3, size=60)
        data = make_dataset(t, cause)
        pv = pseudo_values(data, 1, [0.8])
        curve = cif_estimate(build_event_table(data, "g"), 1)
        assert abs(pv.values[:, 0].mean() - curve.at(0.8)) <= 1e-10


class TestGeeFit:
    def test_logit_closed_form(self, gee_dataset):
        # group means 0.6 and 0.3 with n=10 each: the saturated fit is
        # beta2 = logit(0.6) - logit(0.3) with a moment sandwich
        pv = pseudo_values(gee_dataset, 1, [1.0])
        x = gee_dataset.group_indicator("a").astype(float)
        fit = gee_fit(pv, x, LinkKind.LOGIT)
        assert abs(fit.group_effect - 1.2527629684953678) <= 1e-8
        assert abs(fit.group_effect_variance - 0.8928571428571428) <= 1e-8
        assert fit.iterations <= 50

    def test_cloglog_closed_form(self, gee_dataset):
        pv = pseudo_values(gee_dataset, 1, [1.0])
        x = gee_dataset.group_indicator("a").astype(float)
        fit = gee_fit(pv, x, LinkKind.CLOGLOG)
        assert abs(fit.group_effect - 0.9435088613679676) <= 1e-8
        assert abs(fit.group_effect_variance - 0.5155410652534179) <= 1e-8

    def test_plain_array_accepted(self):
        theta = np.array([0.9, 0.8, 0.7, 0.2, 0.3, 0.1])
        x = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
        fit = gee_fit(theta, x)
        p1, p0 = 0.8, 0.2
        expected = math.log(p1 / (1 - p1)) - math.log(p0 / (1 - p0))
        assert abs(fit.group_effect - expected) <= 1e-8

    def test_x_validation(self, gee_dataset):
        pv = pseudo_values(gee_dataset, 1, [1.0])
        with pytest.raises(ValueError):
            gee_fit(pv, np.zeros(20))
        with pytest.raises(ValueError):
            gee_fit(pv, np.full(20, 0.5))
        with pytest.raises(ValueError):
            gee_fit(pv, np.ones(7))

    def test_separation_detected(self):
        # one group has no cause-1 events and no censoring, so its
        # pseudo-values are exactly 0
        times = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
        statuses = [1, 1, 2, 2, 2, 2]
        groups = ["a", "a", "a", "b", "b", "b"]
        data = make_dataset(times, statuses, groups)
        with pytest.raises(SeparationDetected):
            pseudo_test(data, 1, 1.0)


class TestPseudoTest:
    def test_logit_statistic_frozen(self, gee_dataset):
        res = pseudo_test(gee_dataset, 1, 1.0, LinkKind.LOGIT)
        assert abs(res.statistic - 1.7577448618613252) <= 1e-7
        assert res.method == "pseudo-logit"
        assert res.df == 1
        assert res.variance is None

    def test_cloglog_statistic_frozen(self, gee_dataset):
        res = pseudo_test(gee_dataset, 1, 1.0, LinkKind.CLOGLOG)
        assert abs(res.statistic - 1.7267469683376049) <= 1e-7
        assert res.method == "pseudo-llog"

    def test_group_summaries_and_effect_sign(self, gee_dataset):
        res = pseudo_test(gee_dataset, 1, 1.0, LinkKind.LOGIT)
        g1, g2 = res.groups
        assert g1.group == "a" and g2.group == "b"
        assert abs(g1.estimate - 0.6) <= 1e-10
        assert abs(g2.estimate - 0.3) <= 1e-10
        # the first group has higher incidence, so the effect is
        # positive under an increasing link
        assert res.effect > 0

    def test_needs_two_groups(self, dataset_a):
        with pytest.raises(ValueError):
            pseudo_test(dataset_a, 1, 3.0)

    def test_censored_data_runs(self):
        rng = np.random.default_rng(21)
        data = random_dataset(rng, 140)
        res = pseudo_test(data, 1, 0.7)
        assert 0.0 <= res.p_value <= 1.0
        assert res.statistic >= 0.0
