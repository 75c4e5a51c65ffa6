#!/usr/bin/env python3
"""Generate a synthetic 21-day A-B-A study and summarize its phases.

The intervention phase starts with a boosted intake (novelty) that decays
back to baseline; phase means and the effectiveness table are printed.

Usage: python scripts/run_synthetic_study.py [seed]
"""

import sys
import tempfile
from datetime import timedelta
from pathlib import Path

from hydrotrack.gateway import cli
from hydrotrack.hydration import local_datetime
from hydrotrack.simulator import StudyProfile, gen_study, write_events


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    profile = StudyProfile(seed=seed)
    result = gen_study(profile)
    log_path = Path(tempfile.mkdtemp()) / f"study_seed{seed}.log"
    write_events(result.events, log_path)
    print(f"{len(result.events)} events written to {log_path}")
    print(f"generator response draws: {result.effective_counts}\n")

    start = local_datetime(profile.start_ts_ms).date()
    a1_end = start + timedelta(days=profile.phase_a1_days - 1)
    b_end = a1_end + timedelta(days=profile.phase_b_days)
    a2_end = b_end + timedelta(days=profile.phase_a2_days)
    return cli.main([
        "analyze", str(log_path),
        "--phase", f"A1:{start}:{a1_end}",
        "--phase", f"B:{a1_end + timedelta(days=1)}:{b_end}",
        "--phase", f"A2:{b_end + timedelta(days=1)}:{a2_end}",
    ])


if __name__ == "__main__":
    sys.exit(main())
