"""Pseudo-value regression tests for the incidence at fixed times.

For each subject, a pseudo-value at horizon tau is the jackknife
contribution

    theta_i = N * C(tau) - (N - 1) * C_minus_i(tau)

where C is the pooled-sample cumulative incidence estimate and
C_minus_i the same estimate with subject i removed (Klein & Andersen
2005).  Without censoring the pseudo-values reduce to the event
indicators 1{T_i <= tau, cause k}.  Group effects are then estimated
from generalized estimating equations with an independence working
covariance (Liang & Zeger 1986), and the group coefficient gives a
Wald test of equal incidence at the horizon.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import NonConvergence, SeparationDetected, ZeroVariance
from .fixed_time import FixedTimeTestResult, GroupSummary, chi2_pvalue

__all__ = [
    "LinkKind",
    "PseudoValueMatrix",
    "GeeFit",
    "pseudo_values",
    "gee_fit",
    "pseudo_test",
]

_GEE_TOL = 1e-10
_GEE_MAX_ITER = 50


class LinkKind(enum.Enum):
    LOGIT = "logit"
    CLOGLOG = "cloglog"


def _link(x: float, kind: LinkKind) -> float:
    if kind is LinkKind.LOGIT:
        return math.log(x / (1.0 - x))
    return math.log(-math.log(1.0 - x))


def _inverse_link(eta: np.ndarray, kind: LinkKind) -> np.ndarray:
    if kind is LinkKind.LOGIT:
        return 1.0 / (1.0 + np.exp(-eta))
    return 1.0 - np.exp(-np.exp(eta))


def _mean_derivative(eta: np.ndarray, kind: LinkKind) -> np.ndarray:
    if kind is LinkKind.LOGIT:
        mu = 1.0 / (1.0 + np.exp(-eta))
        return mu * (1.0 - mu)
    return np.exp(eta - np.exp(eta))


@dataclass(frozen=True)
class PseudoValueMatrix:
    """Per-subject pseudo-values, one column per horizon.

    Rows align with the records the matrix was computed from.  Values
    may fall outside [0, 1]; that is expected under censoring.
    """

    values: np.ndarray
    times: np.ndarray
    cause: int


@dataclass(frozen=True)
class GeeFit:
    """Converged estimating-equation fit.

    `beta` stacks one intercept per horizon followed by the group
    effect; `sandwich` is the robust covariance of `beta`.
    """

    beta: np.ndarray
    sandwich: np.ndarray
    iterations: int
    link: LinkKind

    @property
    def group_effect(self) -> float:
        return float(self.beta[-1])

    @property
    def group_effect_variance(self) -> float:
        return float(self.sandwich[-1, -1])


def _pooled_pseudo(times: np.ndarray, statuses: np.ndarray, cause: int,
                   taus: np.ndarray, chunk: int) -> np.ndarray:
    n = times.size
    failed = statuses > 0
    knots = np.unique(times[failed & (times <= taus.max())])
    if knots.size == 0:
        return np.zeros((n, taus.size))

    order = np.sort(times)
    at_risk = (n - np.searchsorted(order, knots, side="left")).astype(float)
    relevant = failed & (times <= knots[-1])
    pos = np.searchsorted(knots, times[relevant])
    events = np.bincount(pos, minlength=knots.size).astype(float)
    cause_events = np.bincount(
        pos[statuses[relevant] == cause], minlength=knots.size
    ).astype(float)

    # column index of the last knot at or before each horizon (-1: none)
    cut = np.searchsorted(knots, taus, side="right") - 1

    def incidence_at_cuts(a, d, dk):
        factors = np.where(a > 0.0, (a - d) / np.where(a > 0.0, a, 1.0), 1.0)
        surv_prev = np.concatenate(
            (np.ones(a.shape[:-1] + (1,)), np.cumprod(factors, axis=-1)[..., :-1]),
            axis=-1,
        )
        inc = np.where(a > 0.0, surv_prev * dk / np.where(a > 0.0, a, 1.0), 0.0)
        cum = np.cumsum(inc, axis=-1)
        return np.where(cut >= 0, cum[..., cut], 0.0)

    full = incidence_at_cuts(at_risk, events, cause_events)
    is_cause = statuses == cause

    theta = np.empty((n, taus.size))
    for start in range(0, n, chunk):
        block = slice(start, min(start + chunk, n))
        t_blk = times[block, None]
        hit = (t_blk == knots[None, :]) & failed[block, None]
        a_i = at_risk[None, :] - (t_blk >= knots[None, :])
        d_i = events[None, :] - hit
        dk_i = cause_events[None, :] - (hit & is_cause[block, None])
        loo = incidence_at_cuts(a_i, d_i, dk_i)
        theta[block] = loo + n * (full[None, :] - loo)
    return theta


def pseudo_values(data: Dataset, cause: int, times, chunk: int = 1024) -> PseudoValueMatrix:
    """Jackknife pseudo-values of the pooled-sample incidence of `cause`.

    `times` must be strictly increasing positive horizons.  All groups
    are pooled for the estimate; rows align with `data.records`.
    """
    taus = np.asarray(times, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(taus <= 0.0) or np.any(np.diff(taus) <= 0.0):
        raise ValueError("times must be positive and strictly increasing")
    values = _pooled_pseudo(data.times, data.statuses, int(cause), taus, chunk)
    return PseudoValueMatrix(values=values, times=taus, cause=int(cause))


def gee_fit(pseudo: PseudoValueMatrix | np.ndarray, x, link: LinkKind = LinkKind.LOGIT) -> GeeFit:
    """Fit intercepts-per-horizon plus a group effect to pseudo-values.

    `x` is the 0/1 group indicator per subject.  The working covariance
    is the identity, so the estimating function is

        U(beta) = sum_i D_i' (theta_i - mu_i),    mu_ih = ginv(alpha_h + beta2 x_i)

    solved by damped Newton iteration; the reported covariance is the
    robust sandwich.  Raises SeparationDetected when a group mean
    pseudo-value sits outside (0, 1) and NonConvergence if the solver
    fails to drive max|U| below tolerance.
    """
    link = LinkKind(link)
    theta = pseudo.values if isinstance(pseudo, PseudoValueMatrix) else np.asarray(pseudo, float)
    if theta.ndim == 1:
        theta = theta[:, None]
    x = np.asarray(x, dtype=float)
    if x.shape != (theta.shape[0],):
        raise ValueError("x must be one indicator per row of the pseudo-values")
    if not np.all(np.isin(x, (0.0, 1.0))):
        raise ValueError("x must contain only 0 and 1")
    if x.min() == x.max():
        raise ValueError("x must contain both groups")

    n, m = theta.shape
    # jackknife roundoff leaves means that should be exactly 0 or 1 a
    # few ulps inside the interval, so separate with a matching margin
    edge = n * np.finfo(float).eps
    for g in (0.0, 1.0):
        means = theta[x == g].mean(axis=0)
        if np.any(means <= edge) or np.any(means >= 1.0 - edge):
            raise SeparationDetected(
                f"group {int(g)} mean pseudo-value outside (0, 1): {means!r}"
            )

    pooled = np.clip(theta.mean(axis=0), 1e-6, 1.0 - 1e-6)
    beta = np.concatenate(([_link(p, link) for p in pooled], [0.0]))

    def score(b):
        eta = b[None, :m] + b[m] * x[:, None]
        dmu = _mean_derivative(eta, link)
        resid = theta - _inverse_link(eta, link)
        contrib = dmu * resid
        u = np.concatenate((contrib.sum(axis=0), [float(x @ contrib.sum(axis=1))]))
        return u, dmu, contrib

    def information(dmu):
        d2 = dmu**2
        info = np.zeros((m + 1, m + 1))
        info[np.arange(m), np.arange(m)] = d2.sum(axis=0)
        info[:m, m] = info[m, :m] = x @ d2
        info[m, m] = float(x @ d2.sum(axis=1))
        return info

    u, dmu, _ = score(beta)
    gap = float(np.abs(u).max())
    iterations = 0
    while gap >= _GEE_TOL:
        if iterations >= _GEE_MAX_ITER:
            raise NonConvergence(
                f"estimating equations not solved after {iterations} iterations "
                f"(max |U| = {gap:g})",
                beta=beta,
                residual=gap,
            )
        step = np.linalg.solve(information(dmu), u)
        scale = 1.0
        while True:
            candidate = beta + scale * step
            u_new, dmu_new, _ = score(candidate)
            gap_new = float(np.abs(u_new).max())
            if gap_new < gap or scale < 2.0**-30:
                break
            scale /= 2.0
        beta, u, dmu, gap = candidate, u_new, dmu_new, gap_new
        iterations += 1

    u, dmu, contrib = score(beta)
    per_subject = np.empty((n, m + 1))
    per_subject[:, :m] = contrib
    per_subject[:, m] = x * contrib.sum(axis=1)
    info = information(dmu)
    bread = np.linalg.solve(info, per_subject.T @ per_subject)
    sandwich = np.linalg.solve(info, bread.T).T
    return GeeFit(beta=beta, sandwich=sandwich, iterations=iterations, link=link)


def pseudo_test(data: Dataset, cause: int, t: float,
                link: LinkKind = LinkKind.CLOGLOG, chunk: int = 1024) -> FixedTimeTestResult:
    """Wald test of the group effect on the incidence of `cause` at `t`.

    The dataset must have exactly two groups; the indicator is 1 for
    the first group, so a positive effect means higher transformed
    incidence in the first group.
    """
    link = LinkKind(link)
    if len(data.groups) != 2:
        raise ValueError(f"pseudo_test needs exactly two groups, got {len(data.groups)}")
    pseudo = pseudo_values(data, cause, [t], chunk=chunk)
    x = data.group_indicator(data.groups[0]).astype(float)
    fit = gee_fit(pseudo, x, link)
    effect = fit.group_effect
    var = fit.group_effect_variance
    if var == 0.0:
        if effect == 0.0:
            stat = 0.0
        else:
            raise ZeroVariance(f"group effect {effect!r} has zero sandwich variance")
    else:
        stat = effect**2 / var
    label = "pseudo-llog" if link is LinkKind.CLOGLOG else "pseudo-logit"
    groups = tuple(
        GroupSummary(g, float(pseudo.values[x == flag, 0].mean()), None)
        for g, flag in zip(data.groups, (1.0, 0.0))
    )
    return FixedTimeTestResult(
        statistic=float(stat),
        df=1,
        p_value=chi2_pvalue(float(stat), 1),
        time=float(t),
        cause=int(cause),
        method=label,
        variance=None,
        groups=groups,
        effect=effect,
    )
