"""Averaged circuit models of a DC feeder supplying a constant power load.

Two models live here:

* the open-loop feeder, state ``(i1, v1)``::

      L1 di1/dt = -r1 i1 - v1 + E
      C1 dv1/dt =  i1 - P/v1

* the feeder with a shunt-damper converter at the bus, state
  ``x = (x1, x2, x3, x4) = (i1, v1, i2, v2)`` and duty cycle ``u``::

      L1 dx1/dt = -r1 x1 - x2 + E
      C1 dx2/dt =  x1 - P/x2 - x3
      L2 dx3/dt = -r2 x3 - u x4 + x2
      C2 dx4/dt = -x4/r3 + u x3

All quantities are SI. The CPL term ``P/v`` is singular at ``v = 0``, so every
evaluation rejects bus voltages at or below :data:`V_FLOOR`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

#: Smallest bus / damper voltage accepted by the vector fields [V].
V_FLOOR = 1e-3


class VoltageCollapse(ValueError):
    """A capacitor voltage reached the CPL singularity region."""

    def __init__(self, name: str, value: float, floor: float = V_FLOOR):
        super().__init__(f"{name} = {value:.6g} V is at or below the {floor:g} V floor")
        self.name = name
        self.value = value


@dataclass(frozen=True)
class PlantParams:
    r1: float  # feeder resistance [Ohm]
    L1: float  # feeder inductance [H]
    C1: float  # bus capacitance [F]
    E: float  # source voltage [V]
    r2: float  # damper inductor resistance [Ohm]
    L2: float  # damper inductance [H]
    C2: float  # damper capacitance [F]
    r3: float  # damper switching-loss resistance [Ohm]

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{f.name} must be strictly positive, got {value!r}")

    @classmethod
    def reference(cls) -> "PlantParams":
        """Reference circuit: 24 V source, 0.3 Ohm / 85 uH feeder, 200 uF bus."""
        return cls(r1=0.3, L1=85e-6, C1=200e-6, E=24.0, r2=5e-3, L2=100e-6, C2=1e-3, r3=1e3)

    @property
    def inertia(self) -> np.ndarray:
        """Diagonal of ``D = diag(L1, C1, L2, C2)``."""
        return np.array([self.L1, self.C1, self.L2, self.C2])


@dataclass(frozen=True)
class OpenLoopState:
    i1: float
    v1: float

    def __post_init__(self):
        if not self.v1 > 0:
            raise ValueError(f"open-loop state requires v1 > 0, got {self.v1!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.i1, self.v1])


@dataclass(frozen=True)
class NetworkState:
    x1: float
    x2: float
    x3: float
    x4: float

    def __post_init__(self):
        if not (self.x2 > 0 and self.x4 > 0):
            raise ValueError(f"network state requires x2 > 0 and x4 > 0, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    @classmethod
    def from_array(cls, x) -> "NetworkState":
        return cls(*(float(v) for v in x))


def check_power(P: float) -> float:
    if not P >= 0:
        raise ValueError(f"CPL power must be non-negative, got {P!r}")
    return float(P)


def _guard(name: str, v: float, floor: float = V_FLOOR) -> None:
    if not v > floor:
        raise VoltageCollapse(name, v, floor)


def open_loop_dynamics(state, params: PlantParams, P: float) -> np.ndarray:
    """Time derivative ``(di1/dt, dv1/dt)`` of the feeder without damper.

    ``state`` may be an :class:`OpenLoopState` or any length-2 sequence.
    """
    i1, v1 = (state.i1, state.v1) if isinstance(state, OpenLoopState) else state
    _guard("v1", v1)
    p = params
    return np.array([
        (-p.r1 * i1 - v1 + p.E) / p.L1,
        (i1 - P / v1) / p.C1,
    ])


def closed_loop_dynamics(x, u: float, params: PlantParams, P: float) -> np.ndarray:
    """Time derivative of the damper-equipped network for duty cycle ``u``."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"duty cycle must lie in [0, 1], got {u!r}")
    return _augmented_rhs(x, u, params, P)


def _drift_and_input(x, params, P):
    x1, x2, x3, x4 = x.as_array() if isinstance(x, NetworkState) else x
    _guard("x2", x2)
    p = params
    # Row 1 is -r1 x1 - x2 + E; a frequently reproduced display of this field
    # writes -r1 x1 - x1 + E, which contradicts the state equations.
    f = (
        (-p.r1 * x1 - x2 + p.E) / p.L1,
        (x1 - P / x2 - x3) / p.C1,
        (-p.r2 * x3 + x2) / p.L2,
        (-x4 / p.r3) / p.C2,
    )
    g = (0.0, 0.0, -x4 / p.L2, x3 / p.C2)
    return f, g


def _augmented_rhs(x, u, params, P):
    # No duty-cycle range check: used by the design-time analysis where u lives in R.
    (f1, f2, f3, f4), (_, _, g3, g4) = _drift_and_input(x, params, P)
    return np.array([f1, f2, f3 + g3 * u, f4 + g4 * u])


def vector_fields(x, params: PlantParams, P: float) -> tuple[np.ndarray, np.ndarray]:
    """Drift ``f(x)`` and input field ``g(x)`` with ``dx/dt = f(x) + g(x) u``."""
    f, g = _drift_and_input(x, params, P)
    return np.array(f), np.array(g)


def stored_energy(x, params: PlantParams) -> float:
    """Energy in the four reactive elements, ``0.5 * sum(D_i x_i^2)`` [J]."""
    x = np.asarray(x.as_array() if isinstance(x, NetworkState) else x, dtype=float)
    return 0.5 * float(params.inertia @ (x * x))


def dissipation_balance(x, params: PlantParams, P: float) -> float:
    """Right-hand side of the power balance ``dH/dt = E x1 - losses - P``.

    Independent of the duty cycle: the converter is lossless in the averaged
    model, so its terms cancel.
    """
    x1, x2, x3, x4 = x.as_array() if isinstance(x, NetworkState) else x
    p = params
    return p.E * x1 - p.r1 * x1**2 - P - p.r2 * x3**2 - x4**2 / p.r3
