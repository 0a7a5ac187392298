#!/usr/bin/env python3
"""
Module 04.00 - Efficiency Study

Median wall time versus reconstruction error for each method, plus the
SENO3 / SQUAD ordinal comparison on both generating curves.
"""

import sys
from datetime import datetime
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from modules.curve_io import write_table  # noqa: E402
from modules.harness import (  # noqa: E402
    GeneratingCurve,
    doubling_range,
    efficiency_ordinal_summary,
    efficiency_study,
    timing_frame,
)
from modules.settings import load_settings  # noqa: E402


def main():
    """Generate the timing records"""
    print("⏱️ Running efficiency study...")
    output_dir = Path(__file__).parent / "output"
    output_dir.mkdir(exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    harness = load_settings().harness
    grids = {
        "kinked": doubling_range(harness.inv_dt_min, harness.inv_dt_max),
        "smooth": doubling_range(harness.inv_dt_min, harness.smooth_inv_dt_max),
    }

    try:
        records = {}
        for kind, grid in grids.items():
            records[kind] = efficiency_study(GeneratingCurve(kind, harness.sigma), harness.methods, grid,
                                             harness.reps, harness.samples_per_interval, harness.seno_k)
            write_table(timing_frame(records[kind]), output_dir / f"timing_{kind}_{timestamp}.csv")

        summary = efficiency_ordinal_summary(records["kinked"], records["smooth"])
        print(f"   📊 kinked, error {summary.kinked_error_level}: SENO3 faster than SQUAD -> "
              f"{summary.seno3_dominates_kinked}")
        print(f"   📊 smooth, error {summary.smooth_error_level}: SQUAD faster than SENO3 -> "
              f"{summary.squad_faster_smooth}")
        print(f"✅ Timing records written to {output_dir}")
        return True
    except Exception as e:
        print(f"❌ Error running efficiency study: {e}")
        return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
