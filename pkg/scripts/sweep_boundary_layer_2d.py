#!/usr/bin/env python3
"""2D unit-square meshes with a thin layer of stretched elements along the
boundary, in the two settings of interest: fixed maximum aspect ratio with
growing N, and fixed N with growing aspect ratio.

The headline observation: exact kappa(SAS) is essentially independent of the
aspect ratio of the layer elements, while exact kappa(A) grows with it.
"""

import sys
from pathlib import Path

from femcond.cli import main

OUT = Path(__file__).resolve().parent.parent / "results" / "boundary_layer_2d"

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    cal = OUT / "calibration_2d.json"
    rc = main(["calibrate", "--dim", "2", "--n-values", "2,4,8,16", "-o", str(cal)])
    # fixed aspect 125, growing N
    rc = rc or main([
        "sweep", "--family", "boundary_layer_2d",
        "--values", "20,30,45,70,100", "--aspect", "125",
        "--calibration", str(cal),
        "--csv", str(OUT / "fixed_aspect.csv"),
        "--plot-dir", str(OUT / "plots_fixed_aspect"),
    ])
    # fixed N (n_core 100 -> about 20k elements), growing aspect
    rc = rc or main([
        "sweep", "--family", "boundary_layer_2d", "--variable", "aspect",
        "--values", "5,25,125", "--n-core", "100",
        "--calibration", str(cal),
        "--csv", str(OUT / "fixed_n.csv"),
        "--plot-dir", str(OUT / "plots_fixed_n"),
    ])
    sys.exit(rc)
