"""Render runtime fields: one pixel per machine, placed along a Hilbert curve.

Writes PPM files into the directory given on the command line (default
./fields).  Light greys halt early, darker greys late, red at the
longest observed time, white never.
"""

import sys
from pathlib import Path

from beaverlab.census import scan_space
from beaverlab.fields import BACKGROUND, RED, WHITE, field_filename, render_field, render_spectrum_legend

out = Path(sys.argv[1] if len(sys.argv) > 1 else "fields")
out.mkdir(parents=True, exist_ok=True)

for n in (1, 2):
    scan = scan_space(n, runtimes=True)
    image = render_field(scan.runtimes, scan.budget)
    path = out / field_filename(n, image.order)
    image.save(path)
    print(f"({n},2): {image.width}x{image.height}  red {image.count(RED)}  white {image.count(WHITE)}  "
          f"unused {image.count(BACKGROUND)}  -> {path}")
    if scan.budget > 1:
        render_spectrum_legend(scan.budget).save(out / f"legend_{n}.ppm")

# the (3,2) field is 4096x4096; keep a corner of it
scan = scan_space(3, runtimes=True)
corner = render_field(scan.runtimes, scan.budget).crop(0, 0, 256, 256)
corner.save(out / "field_3x2_corner.ppm")
print(f"(3,2): 256x256 corner -> {out / 'field_3x2_corner.ppm'}")
