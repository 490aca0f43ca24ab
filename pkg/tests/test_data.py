import numpy as np
import pytest

from cifpoint.data import (
    Dataset,
    EventTable,
    SubjectRecord,
    build_event_table,
    event_table_from_arrays,
    parse_dataset,
)
from cifpoint.errors import InvalidRecord

from conftest import make_dataset


class TestSubjectRecord:
    def test_valid(self):
        r = SubjectRecord(time=1.5, status=2, group="a")
        assert (r.time, r.status, r.group) == (1.5, 2, "a")

    @pytest.mark.parametrize("time", [0.0, -1.0, float("nan"), float("inf")])
    def test_bad_time(self, time):
        with pytest.raises(InvalidRecord):
            SubjectRecord(time=time, status=1, group="a")

    def test_bad_status(self):
        with pytest.raises(InvalidRecord):
            SubjectRecord(time=1.0, status=-1, group="a")


class TestDataset:
    def test_groups_in_order_of_appearance(self):
        data = make_dataset([1, 2, 3], [1, 1, 1], ["b", "a", "b"])
        assert data.groups == ("b", "a")

    def test_causes_sorted(self):
        data = make_dataset([1, 2, 3], [2, 1, 2])
        assert data.causes == (1, 2)

    def test_group_indicator(self):
        data = make_dataset([1, 2, 3], [1, 1, 1], ["b", "a", "b"])
        assert data.group_indicator("b").tolist() == [1, 0, 1]

    def test_empty_rejected(self):
        with pytest.raises(InvalidRecord):
            Dataset(records=())


class TestEventTable:
    def test_fixture_counts(self, table_a):
        assert table_a.times.tolist() == [1.0, 3.0, 4.0]
        assert table_a.at_risk.tolist() == [5, 3, 2]
        assert table_a.events.tolist() == [1, 1, 1]
        assert table_a.cause_events[1].tolist() == [1, 1, 0]
        assert table_a.cause_events[2].tolist() == [0, 0, 1]
        assert table_a.censor_times.tolist() == [2.0, 5.0]
        assert table_a.size == 5

    def test_censored_at_event_time_stays_at_risk(self):
        # a subject censored exactly at an event time still counts in
        # the risk set of that time
        table = event_table_from_arrays([1.0, 1.0, 2.0], [1, 0, 1], "g")
        assert table.times.tolist() == [1.0, 2.0]
        assert table.at_risk.tolist() == [3, 1]

    def test_tied_events_pooled(self):
        table = event_table_from_arrays([1.0, 1.0, 2.0], [1, 2, 1], "g")
        assert table.times.tolist() == [1.0, 2.0]
        assert table.events.tolist() == [2, 1]
        assert table.cause_events[1].tolist() == [1, 1]
        assert table.cause_events[2].tolist() == [1, 0]

    def test_build_carries_dataset_causes(self):
        # a group without cause-2 events still reports a zero row for
        # cause 2 when the other group has some
        data = make_dataset([1, 2, 3, 4], [1, 1, 2, 1], ["x", "x", "y", "x"])
        table = build_event_table(data, "x")
        assert set(table.cause_events) == {1, 2}
        assert table.cause_events[2].tolist() == [0, 0, 0]

    def test_invariants_enforced(self):
        with pytest.raises(InvalidRecord):
            EventTable(
                group="g",
                times=np.array([2.0, 1.0]),
                at_risk=np.array([5, 3]),
                events=np.array([1, 1]),
                cause_events={1: np.array([1, 1])},
                censor_times=np.array([]),
                size=5,
            )
        with pytest.raises(InvalidRecord):
            EventTable(
                group="g",
                times=np.array([1.0]),
                at_risk=np.array([5]),
                events=np.array([0]),
                cause_events={1: np.array([0])},
                censor_times=np.array([]),
                size=5,
            )

    def test_cause_sum_must_match(self):
        with pytest.raises(InvalidRecord):
            EventTable(
                group="g",
                times=np.array([1.0]),
                at_risk=np.array([5]),
                events=np.array([2]),
                cause_events={1: np.array([1])},
                censor_times=np.array([]),
                size=5,
            )


class TestParseDataset:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text(
            "time,status,arm\n"
            "1.0,1,x\n"
            "2.5,0,y\n"
            "3.0,2,x\n"
        )
        data = parse_dataset(path, "time", "status", "arm")
        assert data.groups == ("x", "y")
        assert data.times.tolist() == [1.0, 2.5, 3.0]
        assert data.statuses.tolist() == [1, 0, 2]

    def test_single_group_default(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("time,status\n1.0,1\n2.0,0\n")
        data = parse_dataset(path, "time", "status")
        assert len(data.groups) == 1

    def test_missing_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("time,status\n1.0,1\n")
        with pytest.raises(InvalidRecord, match="arm"):
            parse_dataset(path, "time", "status", "arm")

    def test_bad_row_reports_row_number(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("time,status\n1.0,1\n-2.0,1\n")
        with pytest.raises(InvalidRecord, match=r"d\.csv:3"):
            parse_dataset(path, "time", "status")

    def test_non_numeric_time(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("time,status\nabc,1\n")
        with pytest.raises(InvalidRecord):
            parse_dataset(path, "time", "status")
