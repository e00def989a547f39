"""Explicit Runge-Kutta steppers: classical RK4 and Dormand-Prince 5(4)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .plant import VoltageCollapse

FIXED_RK4 = "fixed-RK4"
ADAPTIVE_RK45 = "adaptive-RK45"


class IntegratorFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = ADAPTIVE_RK45
    dt: float = 1e-6  # fixed step; initial trial step for RK45
    rtol: float = 1e-8
    atol: float = 1e-10
    dt_min: float = 1e-14
    dt_max: float = 1e-4

    def __post_init__(self):
        if self.method not in (FIXED_RK4, ADAPTIVE_RK45):
            raise ValueError(f"unknown integration method {self.method!r}")
        for name in ("dt", "rtol", "atol", "dt_min", "dt_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.dt_min > self.dt_max:
            raise ValueError("dt_min exceeds dt_max")


def rk4_step(f, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6]
# fifth- minus fourth-order weights (7 stages, FSAL)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class StepResult(NamedTuple):
    y: np.ndarray
    dt_taken: float
    dt_next: float
    error: float  # scaled error norm of the accepted step, <= 1


def _dp_attempt(f, t, y, dt):
    ks = [f(t, y)]
    for i in range(1, 7):
        acc = y.copy()
        for a, k in zip(_A[i], ks):
            if a:
                acc += (dt * a) * k
        ks.append(f(t + _C[i] * dt, acc))
    y_new = y + dt * sum(b * k for b, k in zip(_B5, ks) if b)
    err = dt * sum(e * k for e, k in zip(_E, ks) if e)
    return y_new, err


def rk45_step(f, t: float, y: np.ndarray, dt: float, rtol: float, atol: float,
              dt_min: float = 1e-14, dt_max: float = np.inf) -> StepResult:
    """One accepted Dormand-Prince step, retrying with smaller ``dt`` as needed.

    The error norm is the max over components of
    ``|err_i| / (atol + rtol * max(|y_i|, |y_new_i|))``. A stage evaluation that
    trips the voltage guard counts as a rejection; if the step shrinks below
    ``dt_min`` the guard error (or :class:`IntegratorFailure`) propagates.
    """
    while True:
        try:
            y_new, err = _dp_attempt(f, t, y, dt)
        except VoltageCollapse:
            if dt * 0.25 < dt_min:
                raise
            dt *= 0.25
            continue
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        norm = float(np.max(np.abs(err) / scale))
        if not np.isfinite(norm):
            norm = np.inf
        if norm <= 1.0:
            factor = 5.0 if norm == 0.0 else min(5.0, max(0.2, 0.9 * norm ** -0.2))
            return StepResult(y_new, dt, min(dt * factor, dt_max), norm)
        dt *= max(0.2, 0.9 * norm ** -0.25) if np.isfinite(norm) else 0.2
        if dt < dt_min:
            raise IntegratorFailure(f"step size fell below dt_min = {dt_min:g} s at t = {t:.9g} s")
