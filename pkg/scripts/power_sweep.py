"""Final-power sweep of the damped step from 100 W, for both controller modes."""

import argparse
import csv
from dataclasses import astuple, fields

from cpldamp.cli import parse_grid
from cpldamp.control import ADAPTIVE, KNOWN_P
from cpldamp.experiments import damped_step
from cpldamp.sim import SweepRow, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="50:479:50")
    ap.add_argument("--t-end", type=float, default=0.2)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="results/power_sweep.csv")
    args = ap.parse_args()
    grid = parse_grid(args.grid)

    header = ["mode"] + [f.name for f in fields(SweepRow)]
    rows = []
    for mode in (ADAPTIVE, KNOWN_P):
        base = damped_step(100.0, 479.0, 1e-6, mode=mode, t_end=args.t_end)
        for r in sweep(base, grid, workers=args.workers):
            rows.append([mode, *astuple(r)])
            print(f"{mode:8s} P = {r.P:6.1f} W  {r.verdict:14s} x2 = {r.x2_final:.6g} V")
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


if __name__ == "__main__":
    main()
