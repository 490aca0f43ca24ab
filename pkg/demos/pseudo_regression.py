"""
Pseudo-value regression at fixed time points
============================================

Jackknife pseudo-values replace the possibly-censored event indicator
1(T <= t, D = 1) with a quantity that has the right expectation, so an
ordinary GEE can regress incidence on group membership even under
censoring.
"""

import numpy as np

from cifpoint import Dataset, LinkKind, SubjectRecord, gee_fit, pseudo_test, pseudo_values

rng = np.random.default_rng(11)


def draw(n, rate, label):
    failure = rng.exponential(1.0 / rate, size=n)
    cause = np.where(rng.random(n) < 0.55, 1, 2)
    censor = rng.uniform(0.0, 2.8, size=n)
    observed = np.minimum(failure, censor)
    status = np.where(failure <= censor, cause, 0)
    return [
        SubjectRecord(time=float(t), status=int(s), group=label)
        for t, s in zip(observed, status)
    ]


data = Dataset(records=tuple(draw(120, 1.2, "exposed") + draw(120, 0.8, "reference")))

# pseudo-values come from the pooled sample: theta_i = N*C - (N-1)*C_(-i).
# Without censoring they are exactly the 0/1 indicators; with censoring
# they spill slightly outside [0, 1]
pv = pseudo_values(data, 1, [0.5, 1.0])
print("pseudo-value summary at t=0.5 and t=1.0")
print("min ", np.round(pv.values.min(axis=0), 4))
print("mean", np.round(pv.values.mean(axis=0), 4))
print("max ", np.round(pv.values.max(axis=0), 4))

# a GEE with one intercept per horizon and a shared group effect;
# the identity working covariance keeps the estimating equations simple
# and the sandwich covariance fixes up the inference
x = data.group_indicator("exposed").astype(float)
fit = gee_fit(pv, x, LinkKind.CLOGLOG)
print(f"\ncloglog GEE: group effect {fit.group_effect:+.4f}"
      f" (sandwich SE {fit.group_effect_variance ** 0.5:.4f},"
      f" {fit.iterations} iterations)")

# the one-call version tests a single horizon and reports the Wald
# chi-squared; both links are available
for link in (LinkKind.CLOGLOG, LinkKind.LOGIT):
    res = pseudo_test(data, 1, 1.0, link)
    print(f"{res.method:13s} X2={res.statistic:7.4f}  p={res.p_value:.5f}"
          f"  effect={res.effect:+.4f}")
