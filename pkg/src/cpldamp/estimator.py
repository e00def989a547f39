"""Immersion-and-invariance estimator for the unknown CPL power.

The estimate is the algebraic combination ``Phat = -k3 C1 v1^2 / 2 + P_I``
of a measured bus voltage and an integrator state driven by ``i1``, ``v1``
and the damper current ``i2``. Along any solution of the plant the error
``Phat - P`` obeys ``d/dt (Phat - P) = -k3 (Phat - P)`` exactly, whatever the
applied duty cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .plant import PlantParams


@dataclass(frozen=True)
class EstimatorConfig:
    k3: float = 1000.0
    Phat0: float = 0.0
    clamp: bool = False  # feed max(Phat, 0) to the controller

    def __post_init__(self):
        if not self.k3 > 0:
            raise ValueError(f"k3 must be positive, got {self.k3!r}")


@dataclass(frozen=True)
class EstimatorState:
    P_I: float
    Phat: float


def estimate(P_I: float, v1: float, cfg: EstimatorConfig, params: PlantParams) -> float:
    return -0.5 * cfg.k3 * params.C1 * v1 * v1 + P_I


def estimator_state(P_I: float, v1: float, cfg: EstimatorConfig, params: PlantParams) -> EstimatorState:
    return EstimatorState(P_I, estimate(P_I, v1, cfg, params))


def estimator_init(v1: float, cfg: EstimatorConfig, params: PlantParams) -> EstimatorState:
    """Integrator state giving ``Phat(0) = cfg.Phat0`` at bus voltage ``v1``."""
    if not v1 > 0:
        raise ValueError(f"v1 must be positive, got {v1!r}")
    P_I = cfg.Phat0 + 0.5 * cfg.k3 * params.C1 * v1 * v1
    return estimator_state(P_I, v1, cfg, params)


def estimator_derivative(P_I: float, i1: float, v1: float, i2: float,
                         cfg: EstimatorConfig, params: PlantParams) -> float:
    """``dP_I/dt`` [W/s]; uses measured signals only."""
    k3 = cfg.k3
    return k3 * v1 * (i1 - i2) + 0.5 * k3 * k3 * params.C1 * v1 * v1 - k3 * P_I
