import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sip, ts_ms
from hydrotrack.hydration import (
    HydrationConfig,
    PromptBand,
    consumed_today,
    expected_intake,
    feedback_tier,
    goal_completion,
    hydration_level,
    prompt_band,
    snapshot,
)

CFG = HydrationConfig()


# --- consumed_today --------------------------------------------------------

def test_consumed_empty():
    assert consumed_today([], ts_ms(hour=12), CFG) == 0


def test_consumed_sums_day():
    sips = [sip(ts_ms(hour=9), 200), sip(ts_ms(hour=11), 160), sip(ts_ms(hour=15), 400)]
    assert consumed_today(sips, ts_ms(hour=16), CFG) == 760


def test_day_boundary():
    sips = [sip(ts_ms(day=1, hour=23, minute=59), 500), sip(ts_ms(day=2, hour=1), 100)]
    assert consumed_today(sips, ts_ms(day=2, hour=12), CFG) == 100


def test_no_leak_across_disjoint_days():
    sips = [sip(ts_ms(day=d, hour=10), 100 * d) for d in range(1, 8)]
    for d in range(1, 8):
        assert consumed_today(sips, ts_ms(day=d, hour=20), CFG) == 100 * d


# --- expected_intake -------------------------------------------------------

def test_expected_before_start():
    assert expected_intake(ts_ms(hour=8), CFG) == 0


def test_expected_midpoint():
    mid = ts_ms(hour=13, minute=30)  # midpoint of 09:00-18:00
    assert expected_intake(mid, CFG) == pytest.approx(1250)


def test_expected_after_end_clamps():
    cfg = HydrationConfig(daily_goal_ml=1140)
    assert expected_intake(ts_ms(hour=20), cfg) == 1140


# --- hydration_level -------------------------------------------------------

@pytest.mark.parametrize("consumed,expected,level", [
    (0, 500, 0.0),
    (500, 500, 100.0),
    (760, 1140, pytest.approx(100 * 760 / 1140, abs=0.01)),
    (0, 0, 100.0),
    (2000, 500, 100.0),
])
def test_level(consumed, expected, level):
    assert hydration_level(consumed, expected) == level


@given(c1=st.floats(0, 5000), c2=st.floats(0, 5000), e=st.floats(1, 5000))
def test_level_monotone_in_consumed(c1, c2, e):
    if c1 <= c2:
        assert hydration_level(c1, e) <= hydration_level(c2, e)


@given(c=st.floats(0, 5000), e1=st.floats(1, 5000), e2=st.floats(1, 5000))
def test_level_antitone_in_expected(c, e1, e2):
    if e1 <= e2:
        assert hydration_level(c, e1) >= hydration_level(c, e2)


# --- band / tier mapping ---------------------------------------------------

@pytest.mark.parametrize("level,band", [
    (10, PromptBand.LOW), (50, PromptBand.MID),
    (80, PromptBand.HIGH), (20, PromptBand.MID),
    (0, PromptBand.LOW), (100, PromptBand.HIGH),
])
def test_prompt_band(level, band):
    assert prompt_band(level, CFG) == band


@pytest.mark.parametrize("level,tier", [
    (85, 0), (0, 4), (60, 2), (80, 1), (40, 3), (20, 4), (100, 0), (20.5, 3),
])
def test_feedback_tier(level, tier):
    assert feedback_tier(level) == tier


def test_mapping_sweep():
    prev_tier, prev_band = 5, PromptBand.LOW
    for level in range(0, 101):
        tier = feedback_tier(level)
        band = prompt_band(level, CFG)
        assert tier <= prev_tier, "tier must be non-increasing in level"
        assert band >= prev_band, "band must be non-decreasing in level"
        if band == PromptBand.HIGH:
            assert tier in (0, 1)
        if band == PromptBand.LOW:
            assert tier in (3, 4)
        prev_tier, prev_band = tier, band


# --- goal completion / snapshot -------------------------------------------

def test_goal_completion_example():
    cfg = HydrationConfig(daily_goal_ml=1140)
    sips = [sip(ts_ms(hour=10), 760)]
    assert goal_completion(sips, ts_ms(hour=12), cfg) == (760, 1140)


def test_goal_over_completion_not_clamped():
    cfg = HydrationConfig(daily_goal_ml=1140)
    sips = [sip(ts_ms(hour=10), 1200)]
    assert goal_completion(sips, ts_ms(hour=12), cfg) == (1200, 1140)


def test_snapshot_before_active_start():
    snap = snapshot(ts_ms(hour=7), [], CFG)
    assert snap.level_pct == 100 and snap.band == PromptBand.HIGH and snap.tier == 0


def test_snapshot_midpoint_no_intake():
    snap = snapshot(ts_ms(hour=13, minute=30), [], CFG)
    assert snap.level_pct == 0 and snap.band == PromptBand.LOW and snap.tier == 4


def test_snapshot_midpoint_on_pace():
    snap = snapshot(ts_ms(hour=13, minute=30), [sip(ts_ms(hour=10), 1250)], CFG)
    assert snap.level_pct == 100 and snap.band == PromptBand.HIGH and snap.tier == 0


@given(vol=st.floats(0, 3000), hour=st.integers(0, 23))
@settings(max_examples=40)
def test_snapshot_pure(vol, hour):
    sips = [sip(ts_ms(hour=max(hour - 1, 0)), vol)] if vol else []
    now = ts_ms(hour=hour, minute=30)
    assert snapshot(now, sips, CFG) == snapshot(now, sips, CFG)


def test_config_validation():
    with pytest.raises(ValueError):
        HydrationConfig(daily_goal_ml=0)
    with pytest.raises(ValueError):
        HydrationConfig(active_start_min=600, active_end_min=600)
    with pytest.raises(ValueError):
        HydrationConfig(prompt_low_pct=80, prompt_high_pct=20)
