"""Linear-model summaries of simulation grids.

Rejection rates from a grid of scenarios are condensed by no-intercept
least squares on four designs.  Writing Y for the percent rejection
rate (minus the nominal level, for the null case), the models are

    1: TEST x NUM cell means + dummies for TIME and CEN
    2: TEST x TIME cell means + dummies for NUM and CEN
    3: TEST x CEN cell means + dummies for NUM and TIME
    4: TEST cell means + dummies for NUM, TIME and CEN

where TEST has the twelve battery members as levels, NUM the group
size pairs, TIME the fixed times, and CEN the censoring fractions.
Dummy coding drops each factor's first level, so cell-mean estimates
are anchored at the remaining factors' reference levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CifPointError, NumericalError, RankDeficientDesign
from .simulation import TEST_IDS

__all__ = ["Coefficient", "AnovaTable", "ols_no_intercept", "anova_summarize"]

_INTERACTIONS = {1: "NUM1_NUM2", 2: "TIME", 3: "CEN", 4: None}
_RESPONSES = ("type1", "power")


@dataclass(frozen=True)
class Coefficient:
    factor: str
    level: str
    estimate: float


@dataclass(frozen=True)
class AnovaTable:
    """Least-squares coefficients for one model and response."""

    model: int
    response: str
    coefficients: tuple[Coefficient, ...]

    def effects(self, factor: str) -> dict[str, float]:
        found = {c.level: c.estimate for c in self.coefficients if c.factor == factor}
        if not found:
            known = sorted({c.factor for c in self.coefficients})
            raise KeyError(f"no factor {factor!r} in model {self.model}; have {known}")
        return found


def ols_no_intercept(design, y):
    """Least squares through the origin with a rank guard.

    Raises RankDeficientDesign naming the aliased columns (by index)
    when the design loses column rank, and checks that residuals are
    orthogonal to the design afterwards.
    """
    design = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    if design.ndim != 2 or y.shape != (design.shape[0],):
        raise ValueError("design must be 2-d with one response per row")
    if design.shape[0] < design.shape[1]:
        raise RankDeficientDesign(
            f"more columns ({design.shape[1]}) than rows ({design.shape[0]})",
            aliased=range(design.shape[1]),
        )
    r, pivots = scipy.linalg.qr(design, mode="r", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(design.shape) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < design.shape[1]:
        raise RankDeficientDesign(
            f"design has rank {rank} < {design.shape[1]} columns",
            aliased=sorted(int(c) for c in pivots[rank:]),
        )
    coef = np.linalg.lstsq(design, y, rcond=None)[0]
    gap = np.abs(design.T @ (y - design @ coef)).max()
    if gap >= 1e-8 * np.linalg.norm(y):
        raise NumericalError(f"least-squares residuals not orthogonal (gap {gap:g})")
    return coef


def _level_labels(results) -> dict[str, list[str]]:
    labels: dict[str, list[str]] = {"NUM1_NUM2": [], "TIME": [], "CEN": []}
    for res in results:
        s = res.scenario
        for factor, label in (
            ("NUM1_NUM2", f"{s.n1}/{s.n2}"),
            ("TIME", f"{s.t_fixed:g}"),
            ("CEN", f"{s.censor_fraction:g}"),
        ):
            if label not in labels[factor]:
                labels[factor].append(label)
    return labels


def anova_summarize(results, response: str = "type1", model: int = 4) -> AnovaTable:
    """Fit one of the four summary models to a grid of scenario results.

    `response` is "type1" (percent rate minus the nominal level) or
    "power" (percent rate).
    """
    results = list(results)
    if not results:
        raise ValueError("no scenario results to summarize")
    if response not in _RESPONSES:
        raise ValueError(f"response must be one of {_RESPONSES}, got {response!r}")
    if model not in _INTERACTIONS:
        raise ValueError(f"model must be 1, 2, 3 or 4, got {model!r}")

    labels = _level_labels(results)
    rows = []
    for res in results:
        s = res.scenario
        for test in TEST_IDS:
            if res.valid(test) == 0:
                raise CifPointError(
                    f"test {test} has no valid replications in scenario {s}"
                )
            percent = 100.0 * res.rate(test)
            rows.append({
                "TEST": test,
                "NUM1_NUM2": f"{s.n1}/{s.n2}",
                "TIME": f"{s.t_fixed:g}",
                "CEN": f"{s.censor_fraction:g}",
                "y": percent - 100.0 * s.alpha if response == "type1" else percent,
            })

    interaction = _INTERACTIONS[model]
    columns: list[tuple[str, str]] = []
    if interaction is None:
        columns.extend(("TEST", test) for test in TEST_IDS)
    else:
        columns.extend(
            (f"TEST:{interaction}", f"{test}:{lvl}")
            for test in TEST_IDS
            for lvl in labels[interaction]
        )
    for factor in ("NUM1_NUM2", "TIME", "CEN"):
        if factor == interaction:
            continue
        columns.extend((factor, lvl) for lvl in labels[factor][1:])

    design = np.zeros((len(rows), len(columns)))
    y = np.array([row["y"] for row in rows])
    index = {key: j for j, key in enumerate(columns)}
    for i, row in enumerate(rows):
        if interaction is None:
            design[i, index[("TEST", row["TEST"])]] = 1.0
        else:
            cell = f"{row['TEST']}:{row[interaction]}"
            design[i, index[(f"TEST:{interaction}", cell)]] = 1.0
        for factor in ("NUM1_NUM2", "TIME", "CEN"):
            if factor == interaction:
                continue
            key = (factor, row[factor])
            if key in index:
                design[i, index[key]] = 1.0

    try:
        coef = ols_no_intercept(design, y)
    except RankDeficientDesign as exc:
        named = [f"{columns[j][0]}={columns[j][1]}" for j in exc.aliased]
        raise RankDeficientDesign(
            f"model {model} design is rank deficient", aliased=named
        ) from None

    coefficients = tuple(
        Coefficient(factor=f, level=lvl, estimate=float(b))
        for (f, lvl), b in zip(columns, coef)
    )
    return AnovaTable(model=model, response=response, coefficients=coefficients)
