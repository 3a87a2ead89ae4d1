#!/usr/bin/env python3
"""1D sweep over meshes with endpoint-clustered (cosine-spaced) nodes.

Expected trends: exact kappa(A) ~ N^3 and exact kappa(SAS) ~ N^2; the new
distance-weighted bound tracks the scaled case without the extra log factor
the prior bound carries.
"""

import sys
from pathlib import Path

from femcond.cli import main

OUT = Path(__file__).resolve().parent.parent / "results" / "chebyshev"

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    cal = OUT / "calibration_1d.json"
    rc = main(["calibrate", "--dim", "1", "--n-values", "8,16,32,64", "-o", str(cal)])
    rc = rc or main([
        "sweep", "--family", "chebyshev",
        "--values", "32,64,128,256,512,1024",
        "--calibration", str(cal),
        "--csv", str(OUT / "chebyshev.csv"),
        "--plot-dir", str(OUT / "plots"),
    ])
    sys.exit(rc)
