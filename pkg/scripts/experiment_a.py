"""100 W -> 479 W load step at t = 1 us, adaptive and known-power damper.

Writes one CSV per controller mode plus an SVG of x2(t) and u(t) to --out.
"""

import argparse
from pathlib import Path

from cpldamp.experiments import experiment_a, experiment_a_known_power
from cpldamp.io import trajectory_svg, write_csv
from cpldamp.sim import simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/experiment_a")
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    runs = {
        "adaptive": simulate(experiment_a(t_end=args.t_end)),
        "known-P": simulate(experiment_a_known_power(t_end=args.t_end)),
    }
    for name, ts in runs.items():
        with open(out / f"{name}.csv", "w", newline="") as fh:
            write_csv(ts, fh)
        fin = ts.final
        print(f"{name:9s} {ts.status:17s} t = {fin['t']:.4g} s  x2 = {fin['x2']:.6g} V  "
              f"u = {fin['u_applied']:.4g}  Phat = {fin['P_hat']:.6g} W")
    (out / "trajectories.svg").write_text(trajectory_svg(runs, "100 W -> 479 W at 1 us"))


if __name__ == "__main__":
    main()
