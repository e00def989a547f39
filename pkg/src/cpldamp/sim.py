"""Time-domain simulation under scheduled CPL power steps.

Three composite systems are integrated:

* open loop: the bare feeder, state ``(i1, v1)``;
* known-P: feeder + damper with ``u = gamma(x; P)``;
* adaptive: feeder + damper + estimator integrator, state
  ``(x1, x2, x3, x4, P_I)``, with ``u = gamma(x; Phat)``.

Power steps are handled by integrating exactly up to each event time and
restarting with the new power; the feedback is re-evaluated at every stage of
the integrator.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .control import (
    ADAPTIVE, ControllerConfig, error_energy, gamma_raw, saturate, shunt_energy,
)
from .equilibria import PowerOutsideWindow, assignable_equilibrium, open_loop_equilibria
from .estimator import EstimatorConfig, estimate, estimator_derivative, estimator_init
from .integrators import (
    FIXED_RK4, IntegratorConfig, IntegratorFailure, rk4_step, rk45_step,
)
from .plant import (
    V_FLOOR, NetworkState, OpenLoopState, PlantParams, VoltageCollapse,
    _augmented_rhs, check_power, open_loop_dynamics,
)

log = logging.getLogger(__name__)

COLUMNS = ("t", "x1", "x2", "x3", "x4", "u_raw", "u_applied",
           "P_true", "P_hat", "V_error", "z_energy")

COMPLETED = "completed"
VOLTAGE_COLLAPSE = "voltage-collapse"
INTEGRATOR_FAILURE = "integrator-failure"


@dataclass(frozen=True)
class Scenario:
    params: PlantParams
    initial_state: NetworkState | OpenLoopState
    P0: float
    controller: ControllerConfig | None = None  # None: open loop, no damper
    estimator: EstimatorConfig | None = None
    events: tuple[tuple[float, float], ...] = ()  # (time [s], new power [W])
    t_end: float = 1.0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output_stride: int = 10

    def __post_init__(self):
        check_power(self.P0)
        object.__setattr__(self, "events", tuple((float(t), float(P)) for t, P in self.events))
        last = 0.0
        for t, P in self.events:
            check_power(P)
            if not last < t < self.t_end:
                raise ValueError("event times must be strictly increasing inside (0, t_end)")
            last = t
        if self.output_stride < 1:
            raise ValueError("output_stride must be at least 1")
        if self.controller is None:
            if not isinstance(self.initial_state, OpenLoopState):
                raise ValueError("open-loop scenarios start from an OpenLoopState")
        else:
            if not isinstance(self.initial_state, NetworkState):
                raise ValueError("closed-loop scenarios start from a NetworkState")
            if self.controller.mode == ADAPTIVE and self.estimator is None:
                object.__setattr__(self, "estimator", EstimatorConfig())

    @property
    def adaptive(self) -> bool:
        return self.controller is not None and self.controller.mode == ADAPTIVE

    @property
    def final_power(self) -> float:
        return self.events[-1][1] if self.events else self.P0


@dataclass
class TimeSeries:
    data: np.ndarray  # shape (n, len(COLUMNS)), row-major samples
    status: str = COMPLETED
    message: str = ""
    saturated_samples: int = 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def final(self) -> dict[str, float]:
        return dict(zip(COLUMNS, (float(v) for v in self.data[-1])))


def _rhs(sc: Scenario, P: float):
    p, cfg = sc.params, sc.controller
    if cfg is None:
        return lambda t, y: open_loop_dynamics(y, p, P)
    if not sc.adaptive:
        def known(t, y):
            return _augmented_rhs(y, saturate(gamma_raw(y, P, p, cfg)), p, P)
        return known

    est = sc.estimator

    def adaptive(t, y):
        Phat = estimate(y[4], y[1], est, p)
        if est.clamp:
            Phat = max(Phat, 0.0)
        u = saturate(gamma_raw(y, Phat, p, cfg))
        out = np.empty(5)
        out[:4] = _augmented_rhs(y[:4], u, p, P)
        out[4] = estimator_derivative(y[4], y[0], y[1], y[2], est, p)
        return out
    return adaptive


def _initial_vector(sc: Scenario) -> np.ndarray:
    y = sc.initial_state.as_array()
    if sc.adaptive:
        st = estimator_init(y[1], sc.estimator, sc.params)
        y = np.append(y, st.P_I)
    return y


def _sample(sc: Scenario, t: float, y: np.ndarray, P: float) -> tuple:
    p, cfg = sc.params, sc.controller
    if cfg is None:
        return (t, y[0], y[1], 0.0, 0.0, 0.0, 0.0, P, math.nan, math.nan, 0.0)
    Phat = math.nan
    P_ctrl = P
    if sc.adaptive:
        Phat = estimate(y[4], y[1], sc.estimator, p)
        P_ctrl = max(Phat, 0.0) if sc.estimator.clamp else Phat
    u_raw = gamma_raw(y, P_ctrl, p, cfg)
    V = error_energy(y, P, p, cfg).V
    return (t, y[0], y[1], y[2], y[3], u_raw, saturate(u_raw), P, Phat, V,
            shunt_energy(y[3], p))


def _check_state(sc: Scenario, y: np.ndarray) -> None:
    if not y[1] > V_FLOOR:
        raise VoltageCollapse("x2", float(y[1]))
    if sc.controller is not None and not y[3] > V_FLOOR:
        raise VoltageCollapse("x4", float(y[3]))


def simulate(sc: Scenario) -> TimeSeries:
    """Integrate ``sc`` and return the sampled trajectory.

    On voltage collapse or integrator failure the partial trajectory is
    returned with the corresponding status rather than raising.
    """
    cfg: IntegratorConfig = sc.integrator
    y = _initial_vector(sc)
    t, P = 0.0, sc.P0
    rows = [_sample(sc, t, y, P)]
    status, message = COMPLETED, ""
    stops = [(te, Pe) for te, Pe in sc.events] + [(sc.t_end, None)]
    h = cfg.dt
    steps = 0
    try:
        _check_state(sc, y)
        for t_stop, P_next in stops:
            rhs = _rhs(sc, P)
            if cfg.method == FIXED_RK4:
                n = max(1, math.ceil((t_stop - t) / cfg.dt - 1e-9))
                t0, dt = t, (t_stop - t) / n
                for k in range(1, n + 1):
                    y = rk4_step(rhs, t, y, dt)
                    t = t_stop if k == n else t0 + k * dt
                    _check_state(sc, y)
                    steps += 1
                    if steps % sc.output_stride == 0 and k < n:
                        rows.append(_sample(sc, t, y, P))
            else:
                while t < t_stop:
                    remaining = t_stop - t
                    trial = min(h, remaining, cfg.dt_max)
                    res = rk45_step(rhs, t, y, trial, cfg.rtol, cfg.atol, cfg.dt_min, cfg.dt_max)
                    y = res.y
                    t = t_stop if res.dt_taken == remaining else t + res.dt_taken
                    if res.dt_taken < trial or trial < remaining:
                        h = res.dt_next
                    _check_state(sc, y)
                    steps += 1
                    if steps % sc.output_stride == 0 and t < t_stop:
                        rows.append(_sample(sc, t, y, P))
            if P_next is not None:
                P = P_next
            rows.append(_sample(sc, t, y, P))
    except VoltageCollapse as exc:
        status, message = VOLTAGE_COLLAPSE, f"t = {t:.9g} s: {exc}"
    except IntegratorFailure as exc:
        status, message = INTEGRATOR_FAILURE, str(exc)
    if status != COMPLETED:
        log.warning("simulation stopped early: %s", message)
    data = np.array(rows, dtype=float)
    sat = int(np.count_nonzero(data[:, 5] != data[:, 6]))
    if sat:
        log.info("duty cycle saturated at %d of %d samples", sat, len(data))
    return TimeSeries(data, status, message, sat)


# -- sweeps -------------------------------------------------------------------

CONVERGED = "converged"
NOT_CONVERGED = "not-converged"
COLLAPSED = "collapsed"
FAILED = "failed"
OUT_OF_WINDOW = "out-of-window"
NO_EQUILIBRIUM = "no-equilibrium"


@dataclass(frozen=True)
class SweepRow:
    P: float
    verdict: str
    status: str = ""
    target: float = math.nan
    x2_final: float = math.nan
    u_final: float = math.nan
    P_hat_final: float = math.nan
    max_bus_deviation: float = math.nan
    message: str = ""


def retarget(base: Scenario, P: float) -> Scenario:
    """``base`` with its final load power replaced by ``P``."""
    if base.events:
        events = base.events[:-1] + ((base.events[-1][0], float(P)),)
        return replace(base, events=events)
    return replace(base, P0=float(P))


def bus_target(sc: Scenario) -> float:
    """Steady bus voltage the scenario should settle to after its last event.

    Raises :class:`PowerOutsideWindow` or :class:`LookupError` when no such
    steady state exists.
    """
    if sc.controller is not None:
        assignable_equilibrium(sc.params, sc.final_power, sc.controller.x2bar)
        return sc.controller.x2bar
    high = open_loop_equilibria(sc.params, sc.final_power).high
    if high is None:
        raise LookupError(f"no open-loop equilibrium at P = {sc.final_power:g} W")
    return high.v1


def run_point(base: Scenario, P: float, rel_tol: float = 0.01) -> SweepRow:
    sc = retarget(base, P)
    try:
        target = bus_target(sc)
    except PowerOutsideWindow as exc:
        return SweepRow(P, OUT_OF_WINDOW, message=str(exc))
    except LookupError as exc:
        return SweepRow(P, NO_EQUILIBRIUM, message=str(exc))
    ts = simulate(sc)
    fin = ts.final
    if ts.status == VOLTAGE_COLLAPSE:
        verdict = COLLAPSED
    elif ts.status != COMPLETED:
        verdict = FAILED
    elif abs(fin["x2"] - target) <= rel_tol * target:
        verdict = CONVERGED
    else:
        verdict = NOT_CONVERGED
    return SweepRow(
        P, verdict, ts.status, target, fin["x2"], fin["u_applied"], fin["P_hat"],
        float(np.max(np.abs(ts["x2"] - target))), ts.message,
    )


def sweep(base: Scenario, P_grid, workers: int | None = None) -> list[SweepRow]:
    """Run :func:`run_point` for every grid power, optionally in parallel."""
    grid = [float(P) for P in P_grid]
    if not grid:
        return []
    if workers and workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_point, [base] * len(grid), grid))
    return [run_point(base, P) for P in grid]
