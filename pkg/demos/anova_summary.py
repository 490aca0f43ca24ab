"""
Summarizing a simulation grid with linear models
================================================

When a study spans many scenarios, per-cell tables get unwieldy.
Fitting a no-intercept linear model to the percent rejection rates
turns the grid into a few interpretable coefficients: cell means for
the test (or test-by-factor interaction) plus additive adjustments
for the remaining design factors.
"""

from cifpoint import Scenario, anova_summarize, run_scenario

# a small 2x2x2 null grid at 300 replications per cell
results = []
for n1, n2 in [(50, 50), (100, 100)]:
    for t_fixed in (0.5, 1.0):
        for cen in (0.0, 0.30):
            s = Scenario(n1=n1, n2=n2, beta=0.0, censor_fraction=cen,
                         t_fixed=t_fixed, reps=300, master_seed=3)
            results.append(run_scenario(s))

# model 4: one mean per test, dummies for size/time/censoring; the
# response is the percent type I error minus the nominal 5, so a
# coefficient near 0 means good calibration
table = anova_summarize(results, response="type1", model=4)
print("model 4: marginal TEST deviations from nominal (percent)")
for test, estimate in sorted(table.effects("TEST").items(), key=lambda kv: abs(kv[1])):
    print(f"  {test:13s} {estimate:+.3f}")

print("\nadjustments for the other factors")
for factor in ("NUM1_NUM2", "TIME", "CEN"):
    print(f"  {factor}: { {k: round(v, 3) for k, v in table.effects(factor).items()} }")

# model 2 crosses the tests with the time factor instead, exposing
# whether a test's calibration drifts with the evaluation time
interaction = anova_summarize(results, response="type1", model=2)
eff = interaction.effects("TEST:TIME")
print("\nmodel 2: gaynor_llog calibration by time point")
for level, estimate in eff.items():
    if level.startswith("gaynor_llog:"):
        print(f"  {level:17s} {estimate:+.3f}")
