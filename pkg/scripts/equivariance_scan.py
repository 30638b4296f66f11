"""Rotation scan of the two-layer invariant model; prints a per-filter summary.

    python scripts/equivariance_scan.py scripts/configs/scan_2d.json scan_2d.csv
"""

import argparse

import numpy as np

from steerkit import harness


def main():
    p = argparse.ArgumentParser()
    p.add_argument("config")
    p.add_argument("out")
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    cfg = harness.ScanConfig.from_json(a.config)
    rows = harness.scan(cfg, a.workers)
    with open(a.out, "w", newline="") as fh:
        fh.write(harness.rows_to_csv(rows, harness.SCAN_COLUMNS))
    for axis in harness.scan_axes(cfg.dim):
        for kind in cfg.interp:
            err = np.array([r[4] for r in rows if r[1] == axis and r[2] == kind])
            quarter = max(r[4] for r in rows if r[1] == axis and r[2] == kind and r[0] % 90 == 0)
            print(f"{axis} {kind:9s} min {err.min():.3e} mean {err.mean():.3e} max {err.max():.3e}"
                  f" quarter-turn max {quarter:.3e}")


if __name__ == "__main__":
    main()
