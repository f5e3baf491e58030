"""
Concurrence versus momentum mismatch
====================================

Three widths, d from 0 to 10. Narrow profiles lose their entanglement
first; every curve hits zero at d = 2 delta sqrt(sqrt(2) - 1).
Writes curves.csv next to this script for plotting in any tool.
"""

import math
from pathlib import Path

import numpy as np

from pauliphoton.sweep_cli import SweepSpec, run_sweep, format_csv

spec = SweepSpec(widths=(2.0, 4.0, 6.0), d_range=(0.0, 10.0, 101))
rows, failures = run_sweep(spec, jobs=2)
assert not failures

out = Path(__file__).with_name("curves.csv")
out.write_text(format_csv(rows))
print("wrote", out)

for delta in spec.widths:
    c = np.array([r["concurrence"] for r in rows if r["width_e"] == delta])
    d = spec.d_values
    d_star = 2 * delta * math.sqrt(math.sqrt(2) - 1)
    last = d[c > 0].max()
    print(f"delta={delta:g}: C(2)={c[20]:.4f}  last nonzero d={last:.1f}  d*={d_star:.4f}")

# crude text plot, one bar per width
for i in range(0, 101, 10):
    bars = [rows[j * 101 + i]["concurrence"] for j in range(3)]
    print(f"d={spec.d_values[i]:4.1f} " + " | ".join(("#" * round(20 * b)).ljust(20) for b in bars))
