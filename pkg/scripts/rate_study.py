"""Single-layer equivariance error against the angular resolution n_a.

    python scripts/rate_study.py scripts/configs/rate_2d.json rate_2d.csv --na 8,16,32,64
"""

import argparse

from steerkit import harness


def main():
    p = argparse.ArgumentParser()
    p.add_argument("config")
    p.add_argument("out")
    p.add_argument("--na", default="8,16,32,64")
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    cfg = harness.ScanConfig.from_json(a.config)
    rows = harness.rate_study(cfg, [int(v) for v in a.na.split(",")], a.workers)
    with open(a.out, "w", newline="") as fh:
        fh.write(harness.rows_to_csv(rows, harness.RATE_COLUMNS))
    for kind, s in harness.rate_summary(rows).items():
        means = " ".join(f"{n}:{e:.4e}" for n, e in zip(s["n_a"], s["mean_error"]))
        print(f"{kind:8s} slope {s['slope']:+.3f}  {means}")


if __name__ == "__main__":
    main()
