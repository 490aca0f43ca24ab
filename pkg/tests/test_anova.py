import numpy as np
import pytest

from cifpoint.anova import AnovaTable, anova_summarize, ols_no_intercept
from cifpoint.errors import CifPointError, RankDeficientDesign
from cifpoint.simulation import TEST_IDS, Scenario, ScenarioResult


def fake_result(n1, n2, t, cen, rates, reps=1000, excluded=None):
    s = Scenario(n1=n1, n2=n2, beta=0.0, censor_fraction=cen, t_fixed=t,
                 reps=reps, master_seed=1)
    if not isinstance(rates, dict):
        rates = {test: rates for test in TEST_IDS}
    rejections = {test: int(round(rates[test] * reps)) for test in TEST_IDS}
    excluded = excluded or {test: 0 for test in TEST_IDS}
    return ScenarioResult(scenario=s, rejections=rejections, excluded=excluded)


def additive_grid():
    """2 sizes x 2 times grid whose percent response is exactly additive."""
    base = {test: 0.05 + 0.001 * i for i, test in enumerate(TEST_IDS)}
    size_eff = {(50, 50): 0.0, (100, 100): 0.003}
    time_eff = {0.5: 0.0, 1.0: -0.002}
    results = []
    for (n1, n2), se in size_eff.items():
        for t, te in time_eff.items():
            rates = {test: base[test] + se + te for test in base}
            results.append(fake_result(n1, n2, t, 0.0, rates))
    return results


class TestOls:
    def test_identity_design(self):
        y = np.array([1.0, -2.0, 3.5])
        coef = ols_no_intercept(np.eye(3), y)
        assert np.allclose(coef, y, rtol=0, atol=1e-12)

    def test_single_column_mean(self):
        y = np.array([1.0, 2.0, 3.0, 6.0])
        coef = ols_no_intercept(np.ones((4, 1)), y)
        assert abs(coef[0] - 3.0) <= 1e-12

    def test_matches_normal_equations(self):
        rng = np.random.default_rng(4)
        design = rng.normal(size=(30, 5))
        y = rng.normal(size=30)
        coef = ols_no_intercept(design, y)
        expected = np.linalg.solve(design.T @ design, design.T @ y)
        assert np.allclose(coef, expected, rtol=0, atol=1e-8)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(8)
        design = rng.normal(size=(40, 6))
        y = rng.normal(size=40)
        coef = ols_no_intercept(design, y)
        gap = np.abs(design.T @ (y - design @ coef)).max()
        assert gap < 1e-8 * np.linalg.norm(y)

    def test_duplicate_column_flagged(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(20, 1))
        design = np.hstack([a, a, rng.normal(size=(20, 1))])
        with pytest.raises(RankDeficientDesign) as err:
            ols_no_intercept(design, rng.normal(size=20))
        assert len(err.value.aliased) == 1

    def test_more_columns_than_rows(self):
        with pytest.raises(RankDeficientDesign):
            ols_no_intercept(np.ones((2, 3)), np.ones(2))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ols_no_intercept(np.ones((3, 2)), np.ones(4))


class TestSummarize:
    def test_single_scenario_cell_means(self):
        rates = {test: 0.04 + 0.002 * i for i, test in enumerate(TEST_IDS)}
        table = anova_summarize([fake_result(50, 50, 0.5, 0.0, rates)])
        assert isinstance(table, AnovaTable)
        eff = table.effects("TEST")
        for test in TEST_IDS:
            expected = 100.0 * rates[test] - 5.0
            assert abs(eff[test] - expected) <= 1e-10

    def test_power_response(self):
        rates = {test: 0.5 for test in TEST_IDS}
        table = anova_summarize([fake_result(50, 50, 0.5, 0.0, rates)],
                                response="power")
        assert abs(table.effects("TEST")["gaynor_llog"] - 50.0) <= 1e-10

    def test_additive_grid_recovered_exactly(self):
        # the constructed response is additive in TEST, size and time,
        # so model 4 reproduces every observation
        results = additive_grid()
        table = anova_summarize(results, model=4)
        test_eff = table.effects("TEST")
        num_eff = table.effects("NUM1_NUM2")
        time_eff = table.effects("TIME")
        for res in results:
            s = res.scenario
            for test in TEST_IDS:
                y = 100.0 * res.rate(test) - 5.0
                fitted = test_eff[test]
                fitted += num_eff.get(f"{s.n1}/{s.n2}", 0.0)
                fitted += time_eff.get(f"{s.t_fixed:g}", 0.0)
                assert abs(fitted - y) <= 1e-10

    def test_model_two_interaction_columns(self):
        results = additive_grid()
        table = anova_summarize(results, model=2)
        eff = table.effects("TEST:TIME")
        assert len(eff) == 24
        assert "gaynor_llog:0.5" in eff
        assert "pseudo_logit:1" in eff
        # the time factor is absorbed by the interaction
        with pytest.raises(KeyError):
            table.effects("TIME")

    def test_model_one_interaction_columns(self):
        results = additive_grid()
        table = anova_summarize(results, model=1)
        eff = table.effects("TEST:NUM1_NUM2")
        assert len(eff) == 24
        assert "aalen_arcs:100/100" in eff

    def test_dropped_first_level(self):
        results = additive_grid()
        table = anova_summarize(results, model=4)
        num_eff = table.effects("NUM1_NUM2")
        assert "50/50" not in num_eff
        assert "100/100" in num_eff

    def test_unknown_factor_raises(self):
        table = anova_summarize(additive_grid())
        with pytest.raises(KeyError, match="TEST"):
            table.effects("WRONG")

    def test_confounded_grid_rank_deficient(self):
        # size and time move together, so their dummies are aliased
        results = [
            fake_result(50, 50, 0.5, 0.0, 0.05),
            fake_result(100, 100, 1.0, 0.0, 0.06),
        ]
        with pytest.raises(RankDeficientDesign) as err:
            anova_summarize(results, model=4)
        named = " ".join(str(a) for a in err.value.aliased)
        assert "TIME" in named or "NUM1_NUM2" in named

    def test_zero_valid_rejected(self):
        excluded = {test: 0 for test in TEST_IDS}
        excluded["gaynor_llog"] = 1000
        res = fake_result(50, 50, 0.5, 0.0, 0.05, excluded=excluded)
        with pytest.raises(CifPointError, match="gaynor_llog"):
            anova_summarize([res])

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            anova_summarize([])
        res = fake_result(50, 50, 0.5, 0.0, 0.05)
        with pytest.raises(ValueError):
            anova_summarize([res], response="level")
        with pytest.raises(ValueError):
            anova_summarize([res], model=5)
