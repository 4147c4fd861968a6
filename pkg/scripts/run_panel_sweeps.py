#!/usr/bin/env python3
"""Run the two 1-D panel sweeps for the shipped ChR2 skeleton.

Panel 1 sweeps the parent mean at fixed spread (sigma_bar = 0.5); panel 2
sweeps the parent spread at fixed mean (mu_bar = 1).  Both write CSVs under
results/ that any plotting tool can consume; the exact rate, the order-40
series, and the s = 2 and s = 4 bounds are emitted per point.

Rate constants in configs/chr2_receptor.json are unit-rate placeholders;
swap in measured values to study a real receptor.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from transduction_mir.cli import main  # noqa: E402


def run() -> int:
    (ROOT / "results").mkdir(exist_ok=True)
    for name in ("chr2_mean_sweep", "chr2_spread_sweep"):
        config = ROOT / "configs" / f"{name}.json"
        out = ROOT / "results" / f"{name}.csv"
        code = main(
            [
                "sweep",
                "--config",
                str(config),
                "--out",
                str(out),
                "--capacity-by",
                "mir_quadrature",
            ]
        )
        if code != 0:
            return code
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
