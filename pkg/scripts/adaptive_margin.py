"""Which estimator gains and initial estimates let the adaptive law survive the 479 W step.

For each (k3, Phat0) pair the 100 W -> 479 W step is simulated for a short
horizon and classified as surviving (bus within 1% of 12 V at the end) or not.
"""

import argparse
from dataclasses import replace

from cpldamp.estimator import EstimatorConfig
from cpldamp.experiments import experiment_a
from cpldamp.sim import COMPLETED, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k3", default="1e3,3e3,1e4,3e4,1e5")
    ap.add_argument("--phat0", default="0,100,300,479")
    ap.add_argument("--t-end", type=float, default=0.02)
    args = ap.parse_args()
    k3s = [float(v) for v in args.k3.split(",")]
    p0s = [float(v) for v in args.phat0.split(",")]

    print("k3 \\ Phat0 " + "".join(f"{p:>12g}" for p in p0s))
    for k3 in k3s:
        cells = []
        for p0 in p0s:
            sc = replace(experiment_a(t_end=args.t_end), estimator=EstimatorConfig(k3=k3, Phat0=p0))
            ts = simulate(sc)
            ok = ts.status == COMPLETED and abs(ts.final["x2"] - 12.0) < 0.12
            cells.append("ok" if ok else f"x@{ts.final['t'] * 1e6:.0f}us")
        print(f"{k3:<11g}" + "".join(f"{c:>12s}" for c in cells))


if __name__ == "__main__":
    main()
