"""Realize a Cantor set as critical values of a planar distance function.

Builds the planar set, rescans it, reports how many of the prescribed values
come back, and writes a picture of the sites, the detected critical points
and the level curve through one prescribed value.

    python3 demos/prescribed_critical_values.py [out.svg]
"""

import sys

import numpy as np

from critfield.construct import build_ferry_set
from critfield.distfield import critical_values, scan_critical
from critfield.levelset import extract
from critfield.realsets import is_bt
from critfield.setgen import cantor
from critfield.svg import Canvas

K = cantor(0.2, 5, left=1.0).endpoints()
c = build_ferry_set(K)
print(f"target: {K.n_intervals} values in [{K.min:g}, {K.max:g}], sites: {len(c.F.points)}")

records = scan_critical(c.F)
cv = critical_values(c.F, 0.5 * K.min, records=records)
found = sum(cv.contains(v, tol=1e-9) for v in K.points())
print(f"critical points detected: {len(records)}; prescribed values recovered: {found}/{K.n_intervals}")
print("recovered set half-power summable:", is_bt(cv, 0.5)[0])

v = float(K.points()[K.n_intervals // 2])
(x0, y0), (x1, y1) = c.F.vertices().min(0), c.F.vertices().max(0)
pad = 0.1 * c.F.diam
window = (x0 - pad, y0 - pad, x1 + pad, y1 + pad)
curves = extract(c.F, v, window, c.F.diam / 800)
print(f"level curve at r={v:.6f}: {curves.n_components} components")

canvas = Canvas(window)
canvas.polylines(curves.polylines)
canvas.points(c.F.points)
canvas.points(np.array([r.location for r in records]), layer="critical", color="crimson")
out = sys.argv[1] if len(sys.argv) > 1 else "prescribed_critical_values.svg"
with open(out, "w") as fh:
    fh.write(canvas.render())
print("wrote", out)
