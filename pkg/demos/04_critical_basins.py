"""
Where does the critical circle go?
==================================

Each fiber has one critical point. Following it classifies the base circle into
the angles attracted to either curve, escaping angles and undecided ones. The
labels change somewhere around the circle, so neither basin covers it.
A fiber slice is written as a small pixmap.
"""

import sys
from pathlib import Path

from fibred import basin_scan, build_example, fiber_slice
from fibred.io import codes_to_rgb, write_ppm

G = int(sys.argv[1]) if len(sys.argv) > 1 else 512

ex = build_example()
curves = list(ex.curves)
scan = basin_scan(ex.normalized_map, curves, G=G)
print("counts:", dict(sorted(scan.counts.items())))
print("label changes at grid indices:", scan.witnesses)
for i in scan.witnesses:
    j = (i + 1) % G
    print(f"  theta {scan.grid[i]:.5f} {scan.labels[i].label} -> theta {scan.grid[j]:.5f} {scan.labels[j].label}")

codes = fiber_slice(ex.normalized_map, 0.0, curves, px=96, budget=2000)
out = Path("basin_slice.ppm")
write_ppm(out, codes_to_rgb(codes))
print("fiber slice over theta = 0 written to", out.resolve())
