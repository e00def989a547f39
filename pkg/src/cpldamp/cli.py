"""Command-line front end.

Exit codes: 0 ok, 1 configuration error, 2 domain error (no equilibrium or
power outside the assignable window), 3 unstable, 4 I/O error, 5 simulation
stopped early.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments
from .config import ConfigError, load_config
from .equilibria import (
    PowerOutsideWindow, assignable_equilibrium, max_open_loop_power, open_loop_equilibria,
    optimal_operating_point, power_window,
)
from .io import trajectory_svg, write_csv
from .sim import COMPLETED, bus_target, simulate, sweep
from .stability import Classification, open_loop_stability

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_UNSTABLE, EXIT_IO, EXIT_SIM = 0, 1, 2, 3, 4, 5


def _fmt(v) -> str:
    return ", ".join(f"{x:.6g}" for x in v)


def cmd_equilibrium(args) -> int:
    run = load_config(args.config)
    params = run.params
    P = args.power if args.power is not None else run.scenario.final_power
    x2bar = args.bus_voltage if args.bus_voltage is not None else params.E / 2.0
    pmax = max_open_loop_power(params)
    ol = open_loop_equilibria(params, P)
    op = optimal_operating_point(params)
    report = {
        "P": P,
        "x2bar": x2bar,
        "max_open_loop_power": pmax,
        "open_loop_discriminant": ol.discriminant,
        "open_loop_equilibria": [asdict(s) for s in ol.points],
        "power_window": list(power_window(params, x2bar)),
        "realizability_bound": op.realizability_bound,
    }
    lines = [
        f"CPL power P = {P:g} W, bus set-point x2bar = {x2bar:g} V",
        f"open-loop existence bound E^2/(4 r1) = {pmax:.6g} W, discriminant = {ol.discriminant:.6g} V^2",
    ]
    for name, s in zip(("high", "low"), ol.points):
        lines.append(f"  open-loop {name} branch: i1 = {s.i1:.6g} A, v1 = {s.v1:.6g} V")
    lo, hi = report["power_window"]
    lines.append(f"assignable power window at x2bar: ({lo:.6g}, {hi:.6g}) W")
    lines.append(f"duty-cycle realizability bound (x2bar = E/2): P < {op.realizability_bound:.6g} W")
    code = EXIT_OK
    try:
        eq = assignable_equilibrium(params, P, x2bar)
    except PowerOutsideWindow as exc:
        note = str(exc)
        if P > pmax:
            note += f"; no steady state exists above the existence bound {pmax:.6g} W"
        lines.append(f"no assignable equilibrium: {note}")
        report["error"] = note
        code = EXIT_DOMAIN
    else:
        report["xbar"] = list(eq.xbar.as_array())
        report["ubar"] = eq.ubar
        report["residual"] = eq.residual(params)
        lines.append(f"assignable equilibrium xbar = ({_fmt(eq.xbar.as_array())})")
        lines.append(f"equilibrium duty cycle ubar = {eq.ubar:.6g}")
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(lines))
    if code:
        print(report["error"], file=sys.stderr)
    return code


def cmd_stability(args) -> int:
    run = load_config(args.config)
    P = args.power if args.power is not None else run.scenario.final_power
    v = open_loop_stability(run.params, P)
    eig = ", ".join(f"{s.real:.6g}{s.imag:+.6g}j" for s in v.eigenvalues)
    if args.json:
        print(json.dumps({
            "P": P, "regime": v.regime.value, "necessary_bound": v.necessary_bound,
            "classification": v.classification.value,
            "eigenvalues": [[s.real, s.imag] for s in v.eigenvalues],
        }, indent=2))
    else:
        print(f"regime: {v.regime.value}")
        print(f"stability bound: {v.necessary_bound:.1f} W ({v.necessary_bound:.6f} W)")
        print(f"P = {P:g} W: {v.classification.value}")
        print(f"eigenvalues [1/s]: {eig or 'none'}")
    if v.classification == Classification.ASYMPTOTICALLY_STABLE:
        return EXIT_OK
    if v.classification == Classification.NO_EQUILIBRIUM:
        return EXIT_DOMAIN
    return EXIT_UNSTABLE


def _write_series(ts, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(ts, fh)


def cmd_simulate(args) -> int:
    out = Path(args.out)
    if args.paper_experiment == "A":
        runs = {"adaptive": simulate(experiments.experiment_a())}
    elif args.paper_experiment == "B":
        damped, undamped = experiments.experiment_b()
        runs = {"damped": simulate(damped), "undamped": simulate(undamped)}
    else:
        try:
            sc = load_config(args.config).scenario
            bus_target(sc)
        except (PowerOutsideWindow, LookupError) as exc:
            print(f"error: final load has no steady state: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        runs = {"run": simulate(sc)}
    try:
        if len(runs) == 1:
            _write_series(next(iter(runs.values())), out)
        else:
            for name, ts in runs.items():
                _write_series(ts, out.with_name(f"{out.stem}_{name}{out.suffix}"))
        if args.plot:
            Path(args.plot).write_text(trajectory_svg(runs, title=f"experiment {args.paper_experiment or ''}"),
                                       encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    code = EXIT_OK
    for name, ts in runs.items():
        fin = ts.final
        print(f"{name}: status {ts.status}, t = {fin['t']:.6g} s, x2 = {fin['x2']:.6g} V, "
              f"u = {fin['u_applied']:.6g}, {len(ts)} samples")
        if ts.status != COMPLETED:
            print(f"{name}: stopped early ({ts.status}): {ts.message}", file=sys.stderr)
            code = EXIT_SIM
    return code


def parse_grid(spec: str) -> list[float]:
    """``a:b:step`` (inclusive of ``b``) or a comma-separated list."""
    spec = spec.strip()
    if not spec:
        return []
    if ":" in spec:
        a, b, step = (float(v) for v in spec.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        vals = list(np.arange(a, b + 0.5 * step * 1e-9, step))
        if not vals or abs(vals[-1] - b) > 1e-9 * max(1.0, abs(b)):
            vals.append(b)
        return [float(v) for v in vals]
    return [float(v) for v in spec.split(",") if v.strip()]


SWEEP_FIELDS = ("P", "verdict", "status", "target", "x2_final", "u_final", "P_hat_final",
                "max_bus_deviation", "message")


def cmd_sweep(args) -> int:
    try:
        grid = parse_grid(args.grid)
    except ValueError as exc:
        print(f"error: bad grid {args.grid!r}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        base = load_config(args.config).scenario
    except PowerOutsideWindow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    rows = sweep(base, grid, workers=args.workers)
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SWEEP_FIELDS)
            for r in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, k) for k in SWEEP_FIELDS)])
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in rows:
        print(f"P = {r.P:g} W: {r.verdict}" + (f" (x2 = {r.x2_final:.6g} V)" if r.status else ""))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpldamp", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="run configuration (default: $CPLDAMP_CONFIG or built-in)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", help="open-loop and assignable equilibria")
    p.add_argument("--power", type=float)
    p.add_argument("--bus-voltage", type=float, help="x2bar [V], default E/2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("stability", help="open-loop stability verdict")
    p.add_argument("--power", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("simulate", help="integrate a scenario and write CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="SVG file for x2(t) and u(t)")
    p.add_argument("--paper-experiment", choices=("A", "B"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="simulate a grid of final load powers")
    p.add_argument("--grid", required=True, help="start:stop:step or comma list [W]")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
