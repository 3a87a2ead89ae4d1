#!/usr/bin/env python3
"""3D unit-cube meshes with a thin boundary layer (pancake-shaped cells at
the faces), fixed anisotropy with growing N and fixed N with growing
anisotropy.  The p exponent of the 3D bounds defaults to 2.9.
"""

import sys
from pathlib import Path

from femcond.cli import main

OUT = Path(__file__).resolve().parent.parent / "results" / "boundary_layer_3d"

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    cal = OUT / "calibration_3d.json"
    rc = main(["calibrate", "--dim", "3", "--n-values", "2,3,4,5",
               "--p", "2.9", "-o", str(cal)])
    # fixed anisotropy 25:25:1, growing N
    rc = rc or main([
        "sweep", "--family", "boundary_layer_3d",
        "--values", "4,6,8,11,14", "--aspect", "25", "--p", "2.9",
        "--calibration", str(cal),
        "--csv", str(OUT / "fixed_aspect.csv"),
        "--plot-dir", str(OUT / "plots_fixed_aspect"),
    ])
    # fixed N, growing anisotropy
    rc = rc or main([
        "sweep", "--family", "boundary_layer_3d", "--variable", "aspect",
        "--values", "5,10,25,50", "--n-core", "8", "--p", "2.9",
        "--calibration", str(cal),
        "--csv", str(OUT / "fixed_n.csv"),
        "--plot-dir", str(OUT / "plots_fixed_n"),
    ])
    sys.exit(rc)
