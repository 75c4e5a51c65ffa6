"""Command-line entry points: run, replay, analyze, simulate."""

from __future__ import annotations

import argparse
import csv
import os
import sys
import threading
import time
from datetime import date

from .. import analysis, eventlog, hydration, scheduler, sensing, simulator
from ..config import load_kv_file
from . import api as api_mod
from .engine import Engine

EXIT_BIND_FAILURE = 3
EXIT_SENSOR_OPEN_FAILURE = 4
EXIT_STORAGE_FAILURE = 5
EXIT_BAD_INPUT = 2


def _parse_hhmm(text: str) -> int:
    h, _, m = text.partition(":")
    return int(h) * 60 + int(m or "0")


def _service_config(path) -> dict:
    kv = load_kv_file(path) if path else {}
    return kv


def _build_configs(kv: dict):
    hyd = hydration.HydrationConfig(
        daily_goal_ml=float(kv.get("hydration.daily_goal_ml", "2500")),
        active_start_min=_parse_hhmm(kv.get("hydration.active_start", "09:00")),
        active_end_min=_parse_hhmm(kv.get("hydration.active_end", "18:00")),
        utc_offset_min=int(kv.get("hydration.utc_offset_min", "0")),
    )
    messages = scheduler.DEFAULT_MESSAGES
    custom = [kv[k] for k in sorted(kv) if k.startswith("scheduler.message.")]
    if custom:
        messages = tuple(custom)
    sched = scheduler.SchedulerConfig(
        preferred_interval_min=int(kv.get("scheduler.preferred_interval_min", "60")),
        messages=messages,
        quiet_outside_active_hours=kv.get(
            "scheduler.quiet_outside_active_hours", "true").lower() != "false",
    )
    det = sensing.DetectorConfig(
        off_scale_threshold_g=float(kv.get("detector.off_scale_threshold_g", "30")),
        stable_window_ms=int(kv.get("detector.stable_window_ms", "1500")),
        stable_band_g=float(kv.get("detector.stable_band_g", "3")),
        min_sip_g=float(kv.get("detector.min_sip_g", "5")),
        density_g_per_ml=float(kv.get("detector.density_g_per_ml", "1.0")),
    )
    return hyd, sched, det


def cmd_run(args) -> int:
    try:
        kv = _service_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    source = args.sensor or kv.get("sensor_source")
    log_path = args.log or kv.get("log_path")
    if not source or not log_path:
        print("sensor source and log path are required", file=sys.stderr)
        return EXIT_BAD_INPUT

    try:
        hyd, sched, det = _build_configs(kv)
    except ValueError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    try:
        log = eventlog.EventLog(log_path)
    except eventlog.StorageFailure as exc:
        print(f"storage failure: {exc}", file=sys.stderr)
        return EXIT_STORAGE_FAILURE

    try:
        sensor_fh = open(source, "r", encoding="utf-8")
    except OSError as exc:
        print(f"cannot open sensor source: {exc}", file=sys.stderr)
        return EXIT_SENSOR_OPEN_FAILURE

    engine = Engine(log, hyd_cfg=hyd, sched_cfg=sched, det_cfg=det,
                    virtual_clock=True)

    server = None
    if args.serve:
        host = args.host or kv.get("listen_host", "127.0.0.1")
        port = args.port or int(kv.get("listen_port", "8787"))
        try:
            server = api_mod.make_server(engine, host, port)
        except OSError as exc:
            print(f"bind failure on {host}:{port}: {exc}", file=sys.stderr)
            return EXIT_BIND_FAILURE
        threading.Thread(target=server.serve_forever, daemon=True).start()
        print(f"serving on http://{host}:{port}", file=sys.stderr)

    malformed = 0
    try:
        with sensor_fh:
            for line in sensor_fh:
                if not line.strip():
                    continue
                try:
                    sample = sensing.parse_sample(line)
                except sensing.MalformedRecord:
                    malformed += 1
                    continue
                engine.ingest_sample(sample)
    except eventlog.StorageFailure as exc:
        print(f"storage failure: {exc}", file=sys.stderr)
        return EXIT_STORAGE_FAILURE
    if malformed:
        print(f"{malformed} malformed records skipped", file=sys.stderr)

    if server is not None:
        print("replay complete; still serving (Ctrl-C to stop)", file=sys.stderr)
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            pass
        finally:
            engine.stop()
            server.shutdown()
    engine.stop()
    log.close()
    return 0


def cmd_replay(args) -> int:
    try:
        det = sensing.DetectorConfig(
            off_scale_threshold_g=args.off_scale_threshold_g,
            stable_window_ms=args.stable_window_ms,
            stable_band_g=args.stable_band_g,
            min_sip_g=args.min_sip_g,
            density_g_per_ml=args.density_g_per_ml,
        )
    except ValueError as exc:
        print(f"bad detector config: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        fh = open(args.trace, "r", encoding="utf-8")
    except OSError as exc:
        print(f"cannot open trace: {exc}", file=sys.stderr)
        return EXIT_SENSOR_OPEN_FAILURE

    state = sensing.BottleState()
    malformed = 0
    seq = 0
    with fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                sample = sensing.parse_sample(line)
            except sensing.MalformedRecord:
                malformed += 1
                continue
            state, events = sensing.step_detect(state, sample, det)
            for ev in events:
                payload = ()
                if ev.kind in (sensing.SIP, sensing.REFILL):
                    payload = (("volume_ml", repr(ev.volume_ml)),)
                rec = eventlog.LoggedEvent(seq=seq, ts=ev.ts, kind=ev.kind,
                                           payload=payload)
                sys.stdout.write(eventlog.format_event(rec))
                seq += 1
    if malformed:
        print(f"{malformed} malformed records skipped", file=sys.stderr)
    return 0


def _parse_phase_arg(text: str) -> tuple[str, date, date]:
    # NAME:YYYY-MM-DD:YYYY-MM-DD
    name, start, end = text.split(":")
    return name, date.fromisoformat(start), date.fromisoformat(end)


def format_effectiveness_table(rows) -> str:
    lines = [f"{'Type':<20} {'Effective':>9} {'Total':>7} {'Pct':>8}"]
    for r in rows:
        lines.append(f"{r.label:<20} {r.effective:>9} {r.total:>7} {r.pct:>7.2f}%")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    try:
        events, partial = eventlog.read_log(args.log)
    except (OSError, eventlog.UnparseableLog) as exc:
        print(f"unparseable log: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if partial:
        print("note: 1 trailing partial record ignored", file=sys.stderr)

    rows = analysis.effectiveness_table(events)
    print(format_effectiveness_table(rows))
    by_kind = {r.kind: r for r in rows}
    hist = by_kind[eventlog.HISTORICAL_VIEW]
    impl = by_kind[eventlog.TIER_CHANGE]
    prom = by_kind[eventlog.NOTIFICATION]
    print()
    for label, r1, r2 in (("historical vs implicit", hist, impl),
                          ("implicit vs prompting", impl, prom)):
        if r1.total and r2.total:
            res = analysis.chi_square_2x2(r1.effective, r1.total,
                                          r2.effective, r2.total)
            print(f"chi-square {label}: statistic={res.statistic:.1f} "
                  f"df={res.df} p{res.p_bucket}")
        else:
            print(f"chi-square {label}: skipped (empty group)")

    summaries = []
    if args.phase:
        try:
            phases = [_parse_phase_arg(p) for p in args.phase]
            summaries = analysis.phase_summary(events, phases,
                                               utc_offset_min=args.utc_offset_min)
        except (ValueError, analysis.OverlappingPhases) as exc:
            print(f"bad phases: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        print()
        for s in summaries:
            print(f"phase {s.phase}: {s.days} days, mean {s.mean_daily_ml:.1f} mL/day")
            for d, total in s.per_day:
                print(f"  {d.isoformat()}  {total:>8.1f} mL")

    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        with open(os.path.join(args.csv_dir, "effectiveness.csv"), "w",
                  newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "total", "effective", "pct"])
            for r in rows:
                w.writerow([r.label, r.total, r.effective, f"{r.pct:.2f}"])
        with open(os.path.join(args.csv_dir, "phases.csv"), "w",
                  newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["phase", "date", "total_ml"])
            for s in summaries:
                for d, total in s.per_day:
                    w.writerow([s.phase, d.isoformat(), f"{total:.1f}"])
    return 0


def cmd_simulate(args) -> int:
    try:
        if args.kind == "auto":
            kv = load_kv_file(args.spec)
            kind = kv.get("type", "trace")
        else:
            kind = args.kind
        if kind == "trace":
            scenario = simulator.load_scenario(args.spec)
            samples, _truth = simulator.gen_trace(scenario)
            simulator.write_trace(samples, args.out)
        elif kind == "study":
            profile = simulator.load_profile(args.spec)
            result = simulator.gen_study(profile)
            simulator.write_events(result.events, args.out)
        else:
            raise simulator.BadScenario(f"unknown type {kind!r}")
    except (OSError, ValueError) as exc:
        print(f"bad scenario: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hydrotrack",
        description="Water-intake sensing, intervention, and analysis engine")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the daemon over a sensor source")
    run.add_argument("--config", help="key = value service config file")
    run.add_argument("--sensor", help="serial device path or replay file")
    run.add_argument("--log", help="event log path")
    run.add_argument("--serve", action="store_true",
                     help="serve the HTTP API (keeps running after replay)")
    run.add_argument("--host")
    run.add_argument("--port", type=int)
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("replay", help="print detected events for a trace file")
    rep.add_argument("trace")
    rep.add_argument("--off-scale-threshold-g", type=float, default=30.0)
    rep.add_argument("--stable-window-ms", type=int, default=1500)
    rep.add_argument("--stable-band-g", type=float, default=3.0)
    rep.add_argument("--min-sip-g", type=float, default=5.0)
    rep.add_argument("--density-g-per-ml", type=float, default=1.0)
    rep.set_defaults(func=cmd_replay)

    ana = sub.add_parser("analyze", help="effectiveness table, chi-square, phases")
    ana.add_argument("log")
    ana.add_argument("--phase", action="append",
                     help="NAME:START:END (ISO dates, inclusive); repeatable")
    ana.add_argument("--utc-offset-min", type=int, default=0)
    ana.add_argument("--csv-dir", help="also write effectiveness.csv / phases.csv here")
    ana.set_defaults(func=cmd_analyze)

    sim = sub.add_parser("simulate", help="generate a trace or study log")
    sim.add_argument("spec", help="scenario/profile file (key = value)")
    sim.add_argument("out", help="output path")
    sim.add_argument("--kind", choices=["auto", "trace", "study"], default="auto")
    sim.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
