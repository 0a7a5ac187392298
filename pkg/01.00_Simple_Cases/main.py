#!/usr/bin/env python3
"""
Module 01.00 - Simple Cases

Dense curves, angular velocity / acceleration / jerk magnitudes and knot
continuity for SLERP, SQUAD and SIDER2 on the three-knot set and SIDER3 on
the four-knot set.
"""

import sys
from pathlib import Path

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from modules.curve_io import write_table  # noqa: E402
from modules.datasets import load_dataset  # noqa: E402
from modules.derivatives import angular_kinematics, classify_continuity, continuity_jumps  # noqa: E402
from modules.harness import sample_curve  # noqa: E402
from modules.interpolants import build_interpolant  # noqa: E402

CASES = {
    "simple_three_point": ["slerp", "squad", "sider2"],
    "simple_four_point": ["slerp", "squad", "sider3"],
}
DENSITY = 200


def kinematics_series(curve, count: int = DENSITY) -> pd.DataFrame:
    rows = []
    for t in np.linspace(curve.t_start, curve.t_end, count + 1):
        kin = angular_kinematics(curve, t, h=1e-4)
        rows.append({
            "t": t,
            "omega": np.linalg.norm(kin.omega),
            "alpha": np.linalg.norm(kin.alpha),
            "zeta": np.linalg.norm(kin.zeta),
        })
    return pd.DataFrame(rows)


def continuity_rows(name: str, method: str, curve, knots) -> list:
    rows = []
    for index, t_knot in enumerate(knots.times[1:-1], start=1):
        jumps = continuity_jumps(curve, t_knot, max_order=3)
        labels = classify_continuity(jumps)
        for order, jump in jumps.items():
            rows.append({"dataset": name, "method": method, "knot": index, "order": order,
                         "jump": jump, "label": labels[order]})
    return rows


def main():
    """Generate the simple-case tables"""
    print("🎨 Generating simple-case curves...")
    output_dir = Path(__file__).parent / "output"
    output_dir.mkdir(exist_ok=True)

    try:
        continuity = []
        for name, methods in CASES.items():
            knots = load_dataset(name).knots
            for method in methods:
                curve = build_interpolant(method, knots)
                write_table(sample_curve(curve, DENSITY), output_dir / f"curve_{name}_{method}.csv")
                write_table(kinematics_series(curve), output_dir / f"kinematics_{name}_{method}.csv")
                continuity.extend(continuity_rows(name, method, curve, knots))
                print(f"   📊 {name} / {method}")

        write_table(pd.DataFrame(continuity), output_dir / "continuity.csv")
        print(f"✅ Simple cases written to {output_dir}")
        return True
    except Exception as e:
        print(f"❌ Error generating simple cases: {e}")
        return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
