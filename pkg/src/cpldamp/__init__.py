"""Shunt-damper control of a DC feeder with a constant power load."""

from .control import ControllerConfig, gamma, gamma_raw, phi1, phi2
from .equilibria import (
    Equilibrium, PowerOutsideWindow, assignable_equilibrium, equilibrium_input,
    max_open_loop_power, open_loop_equilibria, optimal_operating_point, power_window,
)
from .estimator import EstimatorConfig
from .integrators import IntegratorConfig
from .plant import NetworkState, OpenLoopState, PlantParams, VoltageCollapse
from .sim import Scenario, TimeSeries, simulate, sweep
from .stability import eigenvalues, open_loop_stability

__all__ = [
    "ControllerConfig", "gamma", "gamma_raw", "phi1", "phi2",
    "Equilibrium", "PowerOutsideWindow", "assignable_equilibrium", "equilibrium_input",
    "max_open_loop_power", "open_loop_equilibria", "optimal_operating_point", "power_window",
    "EstimatorConfig", "IntegratorConfig",
    "NetworkState", "OpenLoopState", "PlantParams", "VoltageCollapse",
    "Scenario", "TimeSeries", "simulate", "sweep",
    "eigenvalues", "open_loop_stability",
]
