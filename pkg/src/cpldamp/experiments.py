"""Canned scenarios reproducing the reference numerical experiments.

Experiment A: adaptive damper, load stepped 100 W -> 479 W at t = 1 us,
starting from the 100 W equilibrium with the bus regulated to E/2 = 12 V.

Experiment B: 100 W -> 260 W at t = 1 ms, once with the adaptive damper and
once for the bare feeder starting from its high-voltage 100 W equilibrium.
"""

from __future__ import annotations

from .control import ADAPTIVE, KNOWN_P, ControllerConfig
from .equilibria import assignable_equilibrium, open_loop_equilibria, optimal_operating_point
from .estimator import EstimatorConfig
from .integrators import IntegratorConfig
from .plant import PlantParams
from .sim import Scenario

GAINS = (30.0, 0.78, 1000.0)  # k1, k2, k3


def damped_step(P_from: float, P_to: float, t_step: float, *, mode: str = ADAPTIVE,
                params: PlantParams | None = None, t_end: float = 1.0,
                integrator: IntegratorConfig | None = None,
                output_stride: int = 10) -> Scenario:
    """Closed loop started at the ``P_from`` equilibrium, stepped to ``P_to``."""
    params = params or PlantParams.reference()
    x2bar = optimal_operating_point(params).x2bar
    k1, k2, k3 = GAINS
    eq = assignable_equilibrium(params, P_from, x2bar)
    return Scenario(
        params=params,
        initial_state=eq.xbar,
        P0=P_from,
        controller=ControllerConfig(k1=k1, k2=k2, x2bar=x2bar, mode=mode),
        # estimator starts converged to the pre-step load
        estimator=EstimatorConfig(k3=k3, Phat0=P_from),
        events=((t_step, P_to),),
        t_end=t_end,
        integrator=integrator or IntegratorConfig(),
        output_stride=output_stride,
    )


def undamped_step(P_from: float, P_to: float, t_step: float, *,
                  params: PlantParams | None = None, t_end: float = 1.0,
                  integrator: IntegratorConfig | None = None,
                  output_stride: int = 10) -> Scenario:
    params = params or PlantParams.reference()
    start = open_loop_equilibria(params, P_from).high
    return Scenario(
        params=params,
        initial_state=start,
        P0=P_from,
        events=((t_step, P_to),),
        t_end=t_end,
        integrator=integrator or IntegratorConfig(),
        output_stride=output_stride,
    )


def experiment_a(**kw) -> Scenario:
    return damped_step(100.0, 479.0, 1e-6, **kw)


def experiment_a_known_power(**kw) -> Scenario:
    return damped_step(100.0, 479.0, 1e-6, mode=KNOWN_P, **kw)


def experiment_b(**kw) -> tuple[Scenario, Scenario]:
    """``(damped, undamped)`` pair for the 100 W -> 260 W step."""
    return damped_step(100.0, 260.0, 1e-3, **kw), undamped_step(100.0, 260.0, 1e-3, **kw)
