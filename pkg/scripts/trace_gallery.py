#!/usr/bin/env python3
"""Render a small gallery of equipotential curves as SVG files.

Usage: python3 scripts/trace_gallery.py [outdir]
"""

import sys
from fractions import Fraction as F
from pathlib import Path

from orbitforge.cli import _trace_svg
from orbitforge.dynamics import PolyDS
from orbitforge.exact import Poly
from orbitforge.green import equipotential_trace

GALLERY = [
    ("squaring", Poly([0, 0, 1]), [F(1, 2), F(1), F(3, 2)]),
    ("basilica", Poly([-1, 0, 1]), [F(1, 4), F(1, 2), F(1)]),
    ("disconnected", Poly([-6, 0, 1]), [F(1, 5), F(1), F(2)]),
]


def main() -> int:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("gallery")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, f, levels in GALLERY:
        ds = PolyDS(f)
        for r in levels:
            curve = equipotential_trace(ds, r, n_points=256, tol=F(1, 10**6))
            path = outdir / f"{name}_r{r.numerator}_{r.denominator}.svg"
            path.write_text(_trace_svg(ds, curve))
            print(f"{path}  points={len(curve.points)} dropped={curve.dropped}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
