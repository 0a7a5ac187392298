#!/usr/bin/env python3
"""
Module 02.00 - SENO Selection

Candidate variations and the chosen stencil for the SENO2 and SENO3 windows,
at the default quadrature (k = 3) and with k doubled.
"""

import sys
from pathlib import Path

import pandas as pd

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from modules.curve_io import write_table  # noqa: E402
from modules.datasets import load_dataset  # noqa: E402
from modules.seno import seno_select, seno_selections  # noqa: E402

WINDOWS = ["seno2_case_a", "seno2_case_b", "seno3_six_point"]


def selection_rows(name: str, k: int) -> list:
    dataset = load_dataset(name)
    n = dataset.order
    chosen = seno_select(dataset.knots, n, k)
    central = seno_selections(dataset.knots, n, k)[n - 1]
    rows = []
    for start, length in sorted(central.variations.items()):
        rows.append({
            "dataset": name,
            "k": k,
            "candidate": "S_" + "".join(str(start + m + 1) for m in range(n + 1)),
            "variation": length,
            "selected": start == chosen.start_index,
            "expected": start == dataset.expected_start,
        })
    return rows


def main():
    """Generate the stencil-selection table"""
    print("🔎 Running SENO stencil selection...")
    output_dir = Path(__file__).parent / "output"
    output_dir.mkdir(exist_ok=True)

    try:
        rows = [row for name in WINDOWS for k in (3, 6) for row in selection_rows(name, k)]
        table = pd.DataFrame(rows)
        write_table(table, output_dir / "selection.csv")

        mismatches = table[table["selected"] != table["expected"]]
        if len(mismatches):
            print(f"⚠️ Selections differ from the expected stencil:\n{mismatches}")
        else:
            print("✅ Every window selected its expected stencil")
        return True
    except Exception as e:
        print(f"❌ Error running stencil selection: {e}")
        return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
