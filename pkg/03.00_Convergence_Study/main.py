#!/usr/bin/env python3
"""
Module 03.00 - Convergence Study

Reconstruction error and convergence order for the kinked and smooth
generating curves under grid doubling.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from modules.curve_io import write_table  # noqa: E402
from modules.harness import GeneratingCurve, convergence_frame, convergence_study, doubling_range  # noqa: E402
from modules.settings import load_settings  # noqa: E402


def main():
    """Generate the error / order tables"""
    print("📈 Running convergence study...")
    output_dir = Path(__file__).parent / "output"
    output_dir.mkdir(exist_ok=True)
    harness = load_settings().harness

    try:
        grid = doubling_range(harness.inv_dt_min, harness.inv_dt_max)
        for kind in ("kinked", "smooth"):
            rows = convergence_study(GeneratingCurve(kind, harness.sigma), harness.methods, grid,
                                     harness.samples_per_interval, harness.seno_k, harness.workers)
            frame = convergence_frame(rows)
            write_table(frame, output_dir / f"convergence_{kind}.csv", digits=harness.float_digits)
            finest = frame.iloc[-1]
            orders = ", ".join(f"{m}={finest[f'rho_{m}']:.4f}" for m in harness.methods)
            print(f"   📊 {kind}: orders at inv_dt={grid[-1]}: {orders}")
        print(f"✅ Convergence tables written to {output_dir}")
        return True
    except Exception as e:
        print(f"❌ Error running convergence study: {e}")
        return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
