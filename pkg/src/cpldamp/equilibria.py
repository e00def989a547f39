"""Equilibria of the feeder with and without the shunt damper.

Open loop, the bus voltage solves ``v**2 - E v + P r1 = 0``; real roots exist
while ``P <= E**2 / (4 r1)``. With the damper, any bus voltage ``x2bar`` can be
assigned as long as ``P`` lies in the open window
``(P_M - x2bar**2/r2, P_M)`` with ``P_M = x2bar (E - x2bar) / r1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .plant import NetworkState, OpenLoopState, PlantParams, vector_fields


class PowerOutsideWindow(ValueError):
    """The requested CPL power admits no assignable equilibrium.

    ``bound`` is ``"upper"`` when ``P >= P_M(x2bar)`` (no steady state can
    feed the load) and ``"lower"`` when ``P <= P_M - x2bar**2/r2``.
    """

    def __init__(self, P: float, window: tuple[float, float], bound: str):
        lo, hi = window
        if bound == "upper":
            msg = (f"P = {P:g} W is not below the upper bound {hi:g} W "
                   f"(largest power deliverable at this bus voltage)")
        else:
            msg = f"P = {P:g} W is not above the lower bound {lo:g} W"
        super().__init__(msg)
        self.P = P
        self.window = window
        self.bound = bound


@dataclass(frozen=True)
class OpenLoopEquilibria:
    points: tuple[OpenLoopState, ...]
    discriminant: float

    @property
    def high(self) -> OpenLoopState | None:
        return self.points[0] if self.points else None

    @property
    def low(self) -> OpenLoopState | None:
        return self.points[-1] if self.points else None


@dataclass(frozen=True)
class Equilibrium:
    xbar: NetworkState
    ubar: float
    P: float
    x2bar: float
    kappa1: float
    kappa2: float

    def residual(self, params: PlantParams) -> float:
        """``max |D (f(xbar) + g(xbar) ubar)|`` in circuit units (V and A)."""
        f, g = vector_fields(self.xbar, params, self.P)
        return float(np.max(np.abs(params.inertia * (f + g * self.ubar))))


@dataclass(frozen=True)
class OperatingPoint:
    x2bar: float
    p_low: float
    p_high: float
    realizability_bound: float


def max_open_loop_power(params: PlantParams) -> float:
    return params.E**2 / (4.0 * params.r1)


def open_loop_equilibria(params: PlantParams, P: float) -> OpenLoopEquilibria:
    """Steady states of the undamped feeder, high-voltage branch first.

    Only points with ``v1 > 0`` are returned, so ``P = 0`` yields the single
    no-load point ``(0, E)``.
    """
    E, r1 = params.E, params.r1
    delta = E * E - 4.0 * P * r1
    if abs(delta) <= 1e-12 * E * E:
        v = E / 2.0
        return OpenLoopEquilibria((OpenLoopState((E - v) / r1, v),), delta)
    if delta < 0:
        return OpenLoopEquilibria((), delta)
    v_high = (E + math.sqrt(delta)) / 2.0
    # Vieta's product form avoids cancellation in (E - sqrt(delta)) / 2.
    v_low = P * r1 / v_high
    points = [OpenLoopState((E - v_high) / r1, v_high)]
    if v_low > 0:
        points.append(OpenLoopState((E - v_low) / r1, v_low))
    return OpenLoopEquilibria(tuple(points), delta)


def upper_power(params: PlantParams, x2bar: float) -> float:
    """``P_M(x2bar)``: the largest power extractable at bus voltage ``x2bar``."""
    return x2bar * (params.E - x2bar) / params.r1


def power_window(params: PlantParams, x2bar: float) -> tuple[float, float]:
    if not x2bar > 0:
        raise ValueError(f"x2bar must be positive, got {x2bar!r}")
    hi = upper_power(params, x2bar)
    return hi - x2bar**2 / params.r2, hi


def kappas(params: PlantParams, x2bar: float, P: float) -> tuple[float, float]:
    p, b = params, x2bar
    k1 = -b * b + p.E * b - p.r1 * P
    k2 = (p.r1 + p.r2) * b * b - p.r2 * p.E * b + p.r1 * p.r2 * P
    return k1, k2


def assignable_equilibrium(params: PlantParams, P: float, x2bar: float) -> Equilibrium:
    """Closed-form equilibrium ``(xbar, ubar)`` holding the bus at ``x2bar``.

    Raises :class:`PowerOutsideWindow` unless ``P`` is strictly inside
    :func:`power_window`; on the boundary either ``x4bar`` or ``ubar``
    degenerates.
    """
    window = power_window(params, x2bar)
    k1, k2 = kappas(params, x2bar, P)
    if not k1 > 0:
        raise PowerOutsideWindow(P, window, "upper")
    if not k2 > 0:
        raise PowerOutsideWindow(P, window, "lower")
    p, b = params, x2bar
    x1 = (p.E - b) / p.r1
    x3 = -(P * p.r1 - p.E * b + b * b) / (p.r1 * b)
    x4 = math.sqrt(p.r3 * k1 * k2) / (p.r1 * b)
    ubar = math.sqrt(k2 / (p.r3 * k1))
    return Equilibrium(NetworkState(x1, b, x3, x4), ubar, float(P), float(b), k1, k2)


def equilibrium_input(xbar, params: PlantParams, P: float) -> float:
    """Least-squares input ``-(g'g)^-1 g' f`` at ``xbar``.

    Independent of the closed form in :func:`assignable_equilibrium`; the two
    agree whenever ``xbar`` is an assignable equilibrium.
    """
    f, g = vector_fields(xbar, params, P)
    gg = float(g @ g)
    if gg == 0.0:
        raise ValueError("g(x) vanishes (x3 = x4 = 0); equilibrium input undefined")
    return -float(g @ f) / gg


def annihilator(x, params: PlantParams) -> np.ndarray:
    """Full-rank left annihilator of ``g``: ``annihilator(x) @ g(x) = 0``.

    Rows are scaled by ``D`` so that the residual ``g_perp f`` comes out in
    volts, amperes and watts.
    """
    x = x.as_array() if isinstance(x, NetworkState) else np.asarray(x, dtype=float)
    p = params
    return np.array([
        [p.L1, 0.0, 0.0, 0.0],
        [0.0, p.C1, 0.0, 0.0],
        [0.0, 0.0, p.L2 * x[2], p.C2 * x[3]],
    ])


def annihilator_residual(x, params: PlantParams, P: float) -> np.ndarray:
    f, _ = vector_fields(x, params, P)
    return annihilator(x, params) @ f


def optimal_operating_point(params: PlantParams) -> OperatingPoint:
    """Bus set-point maximizing ``P_M`` and the matching power limits.

    ``x2bar = E/2``. The returned realizability bound is the power below which
    the equilibrium duty cycle stays strictly under one.
    """
    p = params
    E2 = p.E**2
    return OperatingPoint(
        x2bar=p.E / 2.0,
        p_low=E2 * (p.r2 - p.r1) / (4.0 * p.r1 * p.r2),
        p_high=E2 / (4.0 * p.r1),
        realizability_bound=E2 * (p.r2 + p.r3 - p.r1) / (4.0 * p.r1 * (p.r2 + p.r3)),
    )
