"""Input records and per-group event tables.

Data enters as one row per subject: an observed time, an integer status
(0 for censored, k >= 1 for failure from cause k), and a group label.
Everything downstream works from the :class:`EventTable` summary, which
holds the distinct failure times of one group together with the at-risk
and event counts at each of them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRecord

__all__ = [
    "SubjectRecord",
    "Dataset",
    "EventTable",
    "parse_dataset",
    "build_event_table",
    "event_table_from_arrays",
]


@dataclass(frozen=True)
class SubjectRecord:
    """One subject: observed time, status code, and group label."""

    time: float
    status: int
    group: str

    def __post_init__(self):
        if not (isinstance(self.time, (int, float)) and math.isfinite(self.time)):
            raise InvalidRecord(f"time must be finite, got {self.time!r}")
        if self.time <= 0:
            raise InvalidRecord(f"time must be positive, got {self.time!r}")
        if not isinstance(self.status, (int, np.integer)) or isinstance(self.status, bool):
            raise InvalidRecord(f"status must be an integer, got {self.status!r}")
        if self.status < 0:
            raise InvalidRecord(f"status must be >= 0, got {self.status!r}")


@dataclass(frozen=True)
class Dataset:
    """A collection of subject records spanning one or more groups."""

    records: tuple[SubjectRecord, ...]
    groups: tuple[str, ...] = field(init=False)
    causes: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if not self.records:
            raise InvalidRecord("dataset has no records")
        seen: list[str] = []
        for rec in self.records:
            if rec.group not in seen:
                seen.append(rec.group)
        causes = sorted({rec.status for rec in self.records if rec.status > 0})
        object.__setattr__(self, "groups", tuple(seen))
        object.__setattr__(self, "causes", tuple(causes))

    def group_records(self, group: str) -> tuple[SubjectRecord, ...]:
        if group not in self.groups:
            raise KeyError(f"unknown group {group!r}")
        return tuple(rec for rec in self.records if rec.group == group)

    def group_indicator(self, group: str) -> np.ndarray:
        """0/1 vector marking membership of `group`, aligned with records."""
        if group not in self.groups:
            raise KeyError(f"unknown group {group!r}")
        return np.array([1 if rec.group == group else 0 for rec in self.records])

    @property
    def times(self) -> np.ndarray:
        return np.array([rec.time for rec in self.records], dtype=float)

    @property
    def statuses(self) -> np.ndarray:
        return np.array([rec.status for rec in self.records], dtype=int)


@dataclass(frozen=True)
class EventTable:
    """Distinct failure times of one group with counts at each.

    Attributes
    ----------
    group : str
        Group label the table was built from.
    times : ndarray
        Distinct failure times, strictly increasing.
    at_risk : ndarray
        Number of subjects with observed time >= each failure time, so a
        subject censored exactly at a failure time still counts at risk
        there.
    events : ndarray
        All-cause failure count at each time.
    cause_events : dict[int, ndarray]
        Failure count at each time, split by cause.
    censor_times : ndarray
        Observed times of the censored subjects, ascending.
    size : int
        Number of subjects in the group.
    """

    group: str
    times: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray
    cause_events: dict[int, np.ndarray]
    censor_times: np.ndarray
    size: int

    def __post_init__(self):
        t, a, d = self.times, self.at_risk, self.events
        if t.ndim != 1 or a.shape != t.shape or d.shape != t.shape:
            raise InvalidRecord("event table arrays must be 1-d and aligned")
        if t.size and np.any(np.diff(t) <= 0):
            raise InvalidRecord("failure times must be strictly increasing")
        if t.size and np.any(np.diff(a) >= 0):
            raise InvalidRecord("at-risk counts must be strictly decreasing")
        if np.any(d < 1) or np.any(d > a):
            raise InvalidRecord("event counts must satisfy 1 <= d <= at_risk")
        total = np.zeros_like(d)
        for dk in self.cause_events.values():
            if dk.shape != t.shape or np.any(dk < 0):
                raise InvalidRecord("cause-specific counts must align and be >= 0")
            total = total + dk
        if not np.array_equal(total, d):
            raise InvalidRecord("cause-specific counts must sum to the all-cause count")
        if int(d.sum()) + self.censor_times.size != self.size:
            raise InvalidRecord("failures plus censorings must equal the group size")


def parse_dataset(path, time_col: str, status_col: str, group_col: str | None = None) -> Dataset:
    """Read a CSV with one row per subject into a :class:`Dataset`.

    `group_col=None` puts every subject in a single group named "all".
    Raises :class:`InvalidRecord` naming the offending row on bad input.
    """
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InvalidRecord(f"{path}: empty file")
        for col in filter(None, (time_col, status_col, group_col)):
            if col not in reader.fieldnames:
                raise InvalidRecord(f"{path}: missing column {col!r}")
        for lineno, row in enumerate(reader, start=2):
            try:
                time = float(row[time_col])
            except (TypeError, ValueError):
                raise InvalidRecord(f"{path}:{lineno}: bad time {row[time_col]!r}") from None
            raw = row[status_col]
            try:
                status = int(raw)
            except (TypeError, ValueError):
                raise InvalidRecord(f"{path}:{lineno}: bad status {raw!r}") from None
            group = row[group_col] if group_col is not None else "all"
            try:
                records.append(SubjectRecord(time, status, group))
            except InvalidRecord as exc:
                raise InvalidRecord(f"{path}:{lineno}: {exc}") from None
    return Dataset(tuple(records))


def event_table_from_arrays(times, statuses, group: str = "all",
                            causes=None) -> EventTable:
    """Build an :class:`EventTable` directly from parallel arrays.

    `causes` optionally fixes the set of causes carried in the table;
    causes seen in `statuses` are always included.
    """
    times = np.asarray(times, dtype=float)
    statuses = np.asarray(statuses, dtype=int)
    if times.ndim != 1 or times.shape != statuses.shape:
        raise InvalidRecord("times and statuses must be aligned 1-d arrays")
    if times.size == 0:
        raise InvalidRecord("group has no records")
    if np.any(~np.isfinite(times)) or np.any(times <= 0):
        raise InvalidRecord("times must be finite and positive")
    if np.any(statuses < 0):
        raise InvalidRecord("statuses must be >= 0")

    failed = statuses > 0
    knots = np.unique(times[failed])
    order = np.sort(times)
    at_risk = times.size - np.searchsorted(order, knots, side="left")

    pos = np.searchsorted(knots, times[failed])
    events = np.bincount(pos, minlength=knots.size).astype(int)

    seen = sorted(int(k) for k in np.unique(statuses[failed]))
    all_causes = sorted(set(seen) | {int(k) for k in (causes or ())})
    cause_events = {}
    for k in all_causes:
        sel = statuses[failed] == k
        cause_events[k] = np.bincount(pos[sel], minlength=knots.size).astype(int)

    return EventTable(
        group=group,
        times=knots,
        at_risk=at_risk.astype(int),
        events=events,
        cause_events=cause_events,
        censor_times=np.sort(times[~failed]),
        size=int(times.size),
    )


def build_event_table(data: Dataset, group: str) -> EventTable:
    """Summarize one group of a dataset, carrying all causes seen anywhere."""
    recs = data.group_records(group)
    times = np.array([rec.time for rec in recs], dtype=float)
    statuses = np.array([rec.status for rec in recs], dtype=int)
    return event_table_from_arrays(times, statuses, group=group, causes=data.causes)
