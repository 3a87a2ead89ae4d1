#!/usr/bin/env python3
"""1D sweep over geometrically graded meshes (widths halving towards x = 0).

Expected trends: exact kappa(A) ~ 2^N while exact kappa(SAS) stays nearly
flat; the new scaled bound grows only linearly in N whereas the prior one
blows up like 2^N.
"""

import sys
from pathlib import Path

from femcond.cli import main

OUT = Path(__file__).resolve().parent.parent / "results" / "power2"

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    cal = OUT / "calibration_1d.json"
    rc = main(["calibrate", "--dim", "1", "--n-values", "8,16,32,64", "-o", str(cal)])
    rc = rc or main([
        "sweep", "--family", "power2",
        "--values", ",".join(str(n) for n in range(8, 25, 2)),
        "--calibration", str(cal),
        "--csv", str(OUT / "power2.csv"),
        "--plot-dir", str(OUT / "plots"),
    ])
    sys.exit(rc)
