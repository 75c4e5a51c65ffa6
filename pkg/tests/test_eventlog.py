import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sip, ts_ms
from hydrotrack.eventlog import (
    DAY,
    SIP,
    SIPS,
    WEEK,
    EventLog,
    LoggedEvent,
    UnparseableLog,
    format_event,
    history_series,
    parse_line,
    query,
    read_log,
)
from hydrotrack.hydration import HydrationConfig, consumed_today, local_datetime


def make_log(tmp_path, name="events.log"):
    return EventLog(tmp_path / name, fsync=False)


# --- append ----------------------------------------------------------------

def test_first_append_seq_zero(tmp_path):
    log = make_log(tmp_path)
    ev = log.append(1000, SIP, volume_ml=200.0)
    assert ev.seq == 0


def test_seq_increments(tmp_path):
    log = make_log(tmp_path)
    assert log.append(1000, SIP, volume_ml=1.0).seq == 0
    assert log.append(2000, SIP, volume_ml=1.0).seq == 1


def test_append_reload_round_trip(tmp_path):
    log = make_log(tmp_path)
    ev = log.append(1234, "NOTIFICATION", level_pct=66.7, message_index=3)
    log.close()
    events, partial = read_log(log.path)
    assert partial == 0
    assert events == [ev]


def test_append_continues_after_reopen(tmp_path):
    log = make_log(tmp_path)
    log.append(1000, SIP, volume_ml=5.0)
    log.close()
    log2 = make_log(tmp_path)
    assert log2.append(2000, SIP, volume_ml=5.0).seq == 1


def test_late_timestamp_clamped(tmp_path):
    log = make_log(tmp_path)
    log.append(5000, SIP, volume_ml=1.0)
    ev = log.append(3000, SIP, volume_ml=1.0)
    assert ev.ts == 5000
    assert log.clamped == 1


# --- wire format -----------------------------------------------------------

def test_format_is_flat_key_value():
    ev = LoggedEvent(seq=7, ts=99, kind="TIER_CHANGE", payload=(("old", "1"), ("new", "2")))
    assert format_event(ev) == "seq=7 ts=99 kind=TIER_CHANGE old=1 new=2\n"


def test_values_with_spaces_are_percent_encoded():
    ev = LoggedEvent(seq=0, ts=1, kind="HISTORICAL_VIEW",
                     payload=(("note", "two words"),))
    line = format_event(ev)
    assert " two" not in line
    assert parse_line(line) == ev


payload_strategy = st.lists(
    st.tuples(
        st.sampled_from(["volume_ml", "level_pct", "message_index", "old", "new",
                         "granularity", "note"]),
        st.text(min_size=1, max_size=12).filter(lambda s: "\n" not in s),
    ),
    max_size=4, unique_by=lambda kv: kv[0],
)


@given(st.lists(st.tuples(st.integers(0, 10**13),
                          st.sampled_from(["SIP", "REFILL", "NOTIFICATION",
                                           "TIER_CHANGE", "HISTORICAL_VIEW"]),
                          payload_strategy),
                max_size=20))
@settings(max_examples=60, deadline=None)
def test_serialize_parse_serialize_byte_identical(rows):
    rows.sort(key=lambda r: r[0])
    events = [LoggedEvent(seq=i, ts=ts, kind=kind, payload=tuple(payload))
              for i, (ts, kind, payload) in enumerate(rows)]
    blob = "".join(format_event(ev) for ev in events)
    parsed = [parse_line(line) for line in blob.splitlines()]
    assert parsed == events
    assert "".join(format_event(ev) for ev in parsed) == blob


def test_truncated_tail_recovers_complete_records(tmp_path):
    log = make_log(tmp_path)
    for i in range(5):
        log.append(1000 * (i + 1), SIP, volume_ml=10.0)
    log.close()
    raw = open(log.path, "rb").read()
    cut = tmp_path / "cut.log"
    cut.write_bytes(raw[:-7])  # chop mid-record
    events, partial = read_log(cut)
    assert len(events) == 4
    assert partial == 1


def test_garbage_mid_file_raises(tmp_path):
    p = tmp_path / "bad.log"
    p.write_text("seq=0 ts=1 kind=SIP volume_ml=1.0\nnot a record\nseq=1 ts=2 kind=SIP\n")
    with pytest.raises(UnparseableLog):
        read_log(p)


# --- query -----------------------------------------------------------------

def make_mixed_events():
    return [
        LoggedEvent(0, ts_ms(hour=9), "SIP", (("volume_ml", "100.0"),)),
        LoggedEvent(1, ts_ms(hour=10), "NOTIFICATION", (("level_pct", "40.0"),)),
        LoggedEvent(2, ts_ms(hour=11), "SIP", (("volume_ml", "150.0"),)),
        LoggedEvent(3, ts_ms(hour=12), "TIER_CHANGE", (("old", "1"), ("new", "2"))),
        LoggedEvent(4, ts_ms(hour=13), "SIP", (("volume_ml", "200.0"),)),
    ]


def test_query_empty_log():
    assert query([]) == []


def test_query_kind_filter():
    events = make_mixed_events()
    sips = query(events, kinds={"SIP"})
    assert [e.seq for e in sips] == [0, 2, 4]
    notes = query(events, kinds={"NOTIFICATION"})
    assert [e.seq for e in notes] == [1]


def test_query_time_range():
    events = make_mixed_events()
    got = query(events, kinds={"SIP"}, start_ts=ts_ms(hour=10), end_ts=ts_ms(hour=12))
    assert [e.seq for e in got] == [2]


def test_query_full_range_returns_all_once():
    events = make_mixed_events()
    assert query(events, kinds=None) == events


def test_query_bad_range():
    with pytest.raises(ValueError):
        query([], start_ts=10, end_ts=5)


# --- history_series --------------------------------------------------------

def test_history_empty_buckets():
    for gran, n in ((WEEK, 7), (DAY, 24)):
        series = history_series([], gran, ts_ms(hour=12))
        assert len(series.points) == n
        assert all(v == 0 for _, v in series.points)
    assert history_series([], SIPS, ts_ms(hour=12)).points == ()


def test_day_series_buckets_by_hour():
    events = [LoggedEvent(0, ts_ms(hour=10, minute=30), "SIP", (("volume_ml", "200.0"),))]
    series = history_series(events, DAY, ts_ms(hour=12))
    assert dict(series.points)["10"] == 200.0
    assert sum(v for _, v in series.points) == 200.0


def test_sips_series_last_twenty():
    events = [LoggedEvent(i, ts_ms(hour=0) + i * 60000, "SIP",
                          (("volume_ml", f"{float(i)!r}"),)) for i in range(30)]
    series = history_series(events, SIPS, ts_ms(hour=12))
    assert len(series.points) == 20
    assert series.points[-1][1] == 29.0


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 23),
                          st.floats(1, 500)), max_size=40))
@settings(max_examples=40, deadline=None)
def test_week_series_matches_brute_force(rows):
    now = ts_ms(day=8, hour=12)
    events = []
    for i, (days_ago, hour, vol) in enumerate(sorted(rows)):
        t = ts_ms(day=8 - days_ago, hour=hour)
        events.append(LoggedEvent(i, t, "SIP", (("volume_ml", repr(vol)),)))
    series = history_series(sorted(events, key=lambda e: e.ts), WEEK, now)
    # brute-force date grouping oracle
    expected = {}
    for ev in events:
        d = local_datetime(ev.ts).date().isoformat()
        expected[d] = expected.get(d, 0.0) + ev.volume_ml
    for label, total in series.points:
        assert total == pytest.approx(expected.get(label, 0.0))
    assert sum(v for _, v in series.points) == pytest.approx(
        sum(expected.values()))


def test_day_series_sum_equals_consumed_today():
    cfg = HydrationConfig()
    now = ts_ms(hour=16)
    events = [LoggedEvent(i, ts_ms(hour=9 + i), "SIP", (("volume_ml", "100.0"),))
              for i in range(4)]
    series = history_series(events, DAY, now)
    sips = [sip(ev.ts, ev.volume_ml) for ev in events]
    assert sum(v for _, v in series.points) == consumed_today(sips, now, cfg)


def test_unknown_granularity():
    with pytest.raises(ValueError):
        history_series([], "MONTH", 0)
