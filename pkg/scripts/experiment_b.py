"""100 W -> 260 W load step at 1 ms with and without the shunt damper.

The damped leg is run with both the adaptive and the known-power law.
"""

import argparse
from pathlib import Path

from cpldamp.control import KNOWN_P
from cpldamp.experiments import damped_step, experiment_b
from cpldamp.io import trajectory_svg, write_csv
from cpldamp.sim import simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/experiment_b")
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    damped, undamped = experiment_b(t_end=args.t_end)
    runs = {
        "undamped": simulate(undamped),
        "damped-adaptive": simulate(damped),
        "damped-known-P": simulate(damped_step(100.0, 260.0, 1e-3, mode=KNOWN_P, t_end=args.t_end)),
    }
    for name, ts in runs.items():
        with open(out / f"{name}.csv", "w", newline="") as fh:
            write_csv(ts, fh)
        after = ts["x2"][ts["t"] > 1e-3]
        swing = f"{after.min():.4g}..{after.max():.4g} V" if len(after) else "n/a"
        print(f"{name:16s} {ts.status:17s} final x2 = {ts.final['x2']:.6g} V, post-step range {swing}")
    (out / "trajectories.svg").write_text(trajectory_svg(runs, "100 W -> 260 W at 1 ms"))


if __name__ == "__main__":
    main()
