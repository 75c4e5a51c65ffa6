from datetime import date, timedelta

import pytest

from hydrotrack import analysis, eventlog
from hydrotrack.hydration import local_datetime
from hydrotrack.sensing import REFILL, SIP, DetectorConfig, run_detector
from hydrotrack.simulator import (
    BadScenario,
    ScenarioOverflow,
    ScriptedAction,
    StudyProfile,
    TraceScenario,
    gen_exact_effectiveness_log,
    gen_study,
    gen_trace,
    load_profile,
    load_scenario,
    write_events,
    write_trace,
)

CFG = DetectorConfig()


# --- gen_trace -------------------------------------------------------------

def test_empty_scenario_constant_trace():
    sc = TraceScenario(seed=0, duration_ms=10_000, noise_amplitude_g=0.0)
    samples, truth = gen_trace(sc, CFG)
    assert truth == []
    assert all(s.grams == sc.baseline_g for s in samples)
    assert len(samples) == 10_000 // sc.sample_period_ms


def test_single_sip_truth_and_detection():
    sc = TraceScenario(seed=0, duration_ms=60_000, noise_amplitude_g=0.0,
                       scripted=(ScriptedAction(20_000, SIP, 20.0),))
    samples, truth = gen_trace(sc, CFG)
    assert [e.kind for e in truth] == ["BOTTLE_OFF", "BOTTLE_ON", "SIP"]
    assert truth[-1].volume_ml == 20.0
    detected = run_detector(samples, CFG)
    # detector also reports the initial settle
    assert [e.kind for e in detected] == ["BOTTLE_ON", "BOTTLE_OFF", "BOTTLE_ON", "SIP"]
    assert detected[-1].volume_ml == pytest.approx(20.0, abs=1.0)


def test_trace_determinism():
    sc = TraceScenario(seed=42, duration_ms=60_000, noise_amplitude_g=1.2,
                       scripted=(ScriptedAction(20_000, SIP, 15.0),))
    assert gen_trace(sc, CFG) == gen_trace(sc, CFG)


def test_scenario_overflow():
    sc = TraceScenario(seed=0, duration_ms=120_000, baseline_g=60.0,
                       scripted=(ScriptedAction(20_000, SIP, 50.0),))
    with pytest.raises(ScenarioOverflow):
        gen_trace(sc, CFG)


def test_actions_too_close_rejected():
    sc = TraceScenario(seed=0, duration_ms=120_000,
                       scripted=(ScriptedAction(20_000, SIP, 10.0),
                                 ScriptedAction(22_000, SIP, 10.0)))
    with pytest.raises(BadScenario):
        gen_trace(sc, CFG)


def test_detector_recovers_truth_low_noise():
    for seed in range(5):
        sc = TraceScenario(
            seed=seed, duration_ms=250_000, baseline_g=700,
            noise_amplitude_g=CFG.stable_band_g / 2 - 0.6,
            scripted=(ScriptedAction(20_000, SIP, 30.0),
                      ScriptedAction(70_000, "OFF_ON_NO_CHANGE"),
                      ScriptedAction(120_000, REFILL, 100.0),
                      ScriptedAction(170_000, SIP, 12.0)))
        samples, truth = gen_trace(sc, CFG)
        detected = [e for e in run_detector(samples, CFG) if e.kind in (SIP, REFILL)]
        expected = [e for e in truth if e.kind in (SIP, REFILL)]
        assert [e.kind for e in detected] == [e.kind for e in expected]
        for d, t in zip(detected, expected):
            assert d.volume_ml == pytest.approx(t.volume_ml, abs=1.0)


# --- gen_study -------------------------------------------------------------

def small_profile(**kw):
    defaults = dict(
        seed=1, phase_a1_days=2, phase_b_days=6, phase_a2_days=2,
        base_daily_ml=1500.0, novelty_duration_days=3, novelty_decay_days=1,
        events_total={"HISTORICAL_VIEW": 30, "TIER_CHANGE": 40, "NOTIFICATION": 90},
    )
    defaults.update(kw)
    return StudyProfile(**defaults)


def test_study_determinism():
    p = small_profile()
    assert gen_study(p) == gen_study(p)


def test_study_round_trips_through_log_format(tmp_path):
    result = gen_study(small_profile())
    path = tmp_path / "study.log"
    write_events(result.events, path)
    parsed, partial = eventlog.read_log(path)
    assert partial == 0
    assert tuple(parsed) == result.events


def test_study_event_counts_match_profile():
    p = small_profile()
    result = gen_study(p)
    for kind, total in p.events_total.items():
        assert sum(1 for e in result.events if e.kind == kind) == total
        assert result.effective_counts[kind][1] == total


def test_zero_response_prob_zero_effectiveness():
    p = small_profile(response_prob={"HISTORICAL_VIEW": 0.0, "TIER_CHANGE": 0.0,
                                     "NOTIFICATION": 0.0})
    result = gen_study(p)
    rows = analysis.effectiveness_table(result.events)
    assert all(r.effective == 0 for r in rows)


def test_measured_effectiveness_equals_generator_draws():
    # windows never overlap and background sips are thinned, so the
    # analysis must recover the generator's own Bernoulli draws exactly
    result = gen_study(small_profile(seed=9))
    rows = {r.kind: r for r in analysis.effectiveness_table(result.events)}
    for kind, (eff, total) in result.effective_counts.items():
        assert (rows[kind].effective, rows[kind].total) == (eff, total)


def test_effectiveness_converges_to_response_prob():
    # law of large numbers: pooled over several seeds the measured fraction
    # approaches the configured probability
    probs = {"HISTORICAL_VIEW": 0.3, "TIER_CHANGE": 0.17, "NOTIFICATION": 0.07}
    eff = {k: 0 for k in probs}
    tot = {k: 0 for k in probs}
    for seed in range(6):
        result = gen_study(small_profile(seed=seed, response_prob=dict(probs)))
        for kind, (e, t) in result.effective_counts.items():
            eff[kind] += e
            tot[kind] += t
    for kind, p in probs.items():
        assert eff[kind] / tot[kind] == pytest.approx(p, abs=0.06)


def test_study_seq_and_ts_ordered():
    result = gen_study(small_profile())
    seqs = [e.seq for e in result.events]
    assert seqs == list(range(len(seqs)))
    assert all(a.ts <= b.ts for a, b in zip(result.events, result.events[1:]))


def test_novelty_profile_daily_shape():
    p = small_profile(seed=4, phase_a1_days=3, phase_b_days=15, phase_a2_days=3,
                      novelty_boost=0.4, novelty_duration_days=6,
                      novelty_decay_days=2,
                      events_total={"HISTORICAL_VIEW": 45, "TIER_CHANGE": 60,
                                    "NOTIFICATION": 150})
    result = gen_study(p)
    start = local_datetime(p.start_ts_ms).date()
    phases = [
        ("A1", start, start + timedelta(days=2)),
        ("B", start + timedelta(days=3), start + timedelta(days=17)),
        ("A2", start + timedelta(days=18), start + timedelta(days=20)),
    ]
    a1, b, a2 = analysis.phase_summary(result.events, phases)
    b_early = sum(v for _, v in b.per_day[:p.novelty_duration_days]) / p.novelty_duration_days
    b_late = sum(v for _, v in b.per_day[-7:]) / 7
    assert b_early > a1.mean_daily_ml
    assert abs(b_late - a1.mean_daily_ml) < 0.1 * a1.mean_daily_ml


def test_bad_profile_rejected():
    with pytest.raises(BadScenario):
        gen_study(small_profile(response_prob={"HISTORICAL_VIEW": 1.5,
                                               "TIER_CHANGE": 0.1,
                                               "NOTIFICATION": 0.1}))


# --- exact log builder -----------------------------------------------------

def test_exact_log_reproduces_requested_counts():
    totals = {"HISTORICAL_VIEW": 40, "TIER_CHANGE": 60, "NOTIFICATION": 100}
    effectives = {"HISTORICAL_VIEW": 12, "TIER_CHANGE": 10, "NOTIFICATION": 7}
    log = gen_exact_effectiveness_log(totals, effectives)
    rows = {r.kind: r for r in analysis.effectiveness_table(log)}
    for kind in totals:
        assert (rows[kind].effective, rows[kind].total) == \
            (effectives[kind], totals[kind])


# --- scenario / profile files ---------------------------------------------

def test_load_scenario_file(tmp_path):
    p = tmp_path / "scenario.cfg"
    p.write_text("type = trace\nseed = 3\nduration_ms = 90000\n"
                 "baseline_g = 600\nnoise_amplitude_g = 1.0\n"
                 "action.0 = 20000,SIP,25\naction.1 = 60000,REFILL,50\n")
    sc = load_scenario(p)
    assert sc.seed == 3 and len(sc.scripted) == 2
    assert sc.scripted[0] == ScriptedAction(20000, "SIP", 25.0)


def test_load_profile_file(tmp_path):
    p = tmp_path / "profile.cfg"
    p.write_text("type = study\nseed = 7\nbase_daily_ml = 1800\n"
                 "events_total.notification = 120\nresponse_prob.notification = 0.1\n")
    profile = load_profile(p)
    assert profile.seed == 7
    assert profile.events_total["NOTIFICATION"] == 120
    assert profile.response_prob["NOTIFICATION"] == 0.1


def test_load_scenario_wrong_type(tmp_path):
    p = tmp_path / "x.cfg"
    p.write_text("type = study\n")
    with pytest.raises(BadScenario):
        load_scenario(p)


def test_write_trace_format(tmp_path):
    sc = TraceScenario(seed=0, duration_ms=2_000)
    samples, _ = gen_trace(sc, CFG)
    out = tmp_path / "trace.csv"
    write_trace(samples, out)
    lines = out.read_text().splitlines()
    assert len(lines) == len(samples)
    ts, grams = lines[0].split(",")
    assert int(ts) == 0 and float(grams) == 500.0
