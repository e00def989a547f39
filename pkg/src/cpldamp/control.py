"""Passivity-based state feedback for the shunt-damper converter.

With the auxiliary input ``w = x4 u`` the network splits into a three-state
subsystem ``(x1, x2, x3)`` driven by ``w`` and a scalar damper-capacitor
subsystem driven by ``w x3 / x4``. The first subsystem is shaped into the
error dynamics ``D de/dt + (C + R_d) e = 0`` around the reference
``xhat = (x1bar, x2bar, phi1(x2))`` by choosing ``w = phi2(x1, x2, x3)``;
the duty cycle is then ``u = phi2 / x4``.

Only ``x1bar = (E - x2bar)/r1`` and ``x2bar`` enter the law. ``x3bar`` is
never needed explicitly because ``phi1(x2bar) = x3bar`` at the equilibrium.

Seen as a function of the load power, ``gamma = lam P**2 + mu P + xi``; the
adaptive law substitutes the on-line estimate for ``P``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .plant import PlantParams, V_FLOOR, VoltageCollapse, _augmented_rhs, _guard

log = logging.getLogger(__name__)

KNOWN_P = "known-P"
ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class ControllerConfig:
    k1: float = 30.0
    k2: float = 0.78
    x2bar: float = 12.0
    mode: str = ADAPTIVE

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError(f"gains k1, k2 must be non-negative, got {self.k1}, {self.k2}")
        if not self.x2bar > 0:
            raise ValueError(f"x2bar must be positive, got {self.x2bar!r}")
        if self.mode not in (KNOWN_P, ADAPTIVE):
            raise ValueError(f"mode must be {KNOWN_P!r} or {ADAPTIVE!r}, got {self.mode!r}")


@dataclass(frozen=True)
class ErrorEnergy:
    e: np.ndarray  # x13 - xhat
    V: float  # 0.5 e' D e [J]
    damping: np.ndarray  # diagonal of R_d
    dissipation: float  # e' R_d e [W]


def target_current(params: PlantParams, cfg: ControllerConfig) -> float:
    """Feeder current ``x1bar`` that holds the bus at ``x2bar``."""
    return (params.E - cfg.x2bar) / params.r1


def phi1(x2: float, P: float, params: PlantParams, cfg: ControllerConfig) -> float:
    """Reference for the damper current ``x3``."""
    _guard("x2", x2)
    b = cfg.x2bar
    return target_current(params, cfg) - P * b / (x2 * x2) + cfg.k1 * (x2 - b)


def phi2(x13, P: float, params: PlantParams, cfg: ControllerConfig) -> float:
    """Auxiliary control ``w`` [V] for the three-state subsystem."""
    x1, x2, x3 = x13[0], x13[1], x13[2]
    p, b = params, cfg.x2bar
    ref = phi1(x2, P, params, cfg)
    # f2 is the bus-voltage row of the drift, including the 1/C1 factor.
    f2 = (x1 - P / x2 - x3) / p.C1
    a = -p.r2 * ref - p.L2 * (cfg.k1 + 2.0 * P * b / x2**3) * f2
    return a + b + cfg.k2 * (x3 - ref)


def gamma_raw(x, P: float, params: PlantParams, cfg: ControllerConfig) -> float:
    """Unsaturated duty cycle ``phi2(x1, x2, x3) / x4``."""
    x4 = x[3]
    if not x4 > V_FLOOR:
        raise VoltageCollapse("x4", x4)
    return phi2(x, P, params, cfg) / x4


def saturate(u: float) -> float:
    return min(1.0, max(0.0, u))


def gamma(x, P: float, params: PlantParams, cfg: ControllerConfig) -> float:
    """Duty cycle actually applied: :func:`gamma_raw` clamped to ``[0, 1]``."""
    return saturate(gamma_raw(x, P, params, cfg))


def adaptive_gamma(x, Phat: float, params: PlantParams, cfg: ControllerConfig,
                   saturated: bool = True) -> float:
    u = gamma_raw(x, Phat, params, cfg)
    return saturate(u) if saturated else u


def gamma_quadratic_coeffs(x, params: PlantParams, cfg: ControllerConfig) -> tuple[float, float, float]:
    """Coefficients ``(lam, mu, xi)`` with ``gamma_raw(x; P) = lam P^2 + mu P + xi``."""
    x1, x2, x3, x4 = x[0], x[1], x[2], x[3]
    _guard("x2", x2)
    if not x4 > V_FLOOR:
        raise VoltageCollapse("x4", x4)
    p, b, k1, k2 = params, cfg.x2bar, cfg.k1, cfg.k2
    q = x1 - x3
    ref0 = target_current(params, cfg) + k1 * (x2 - b)  # P-free part of phi1
    ref1 = -b / (x2 * x2)  # coefficient of P in phi1
    lc = p.L2 / p.C1
    lam = 2.0 * lc * b / x2**4
    mu = -(p.r2 + k2) * ref1 - lc * (-k1 / x2 + 2.0 * b * q / x2**3)
    xi = -(p.r2 + k2) * ref0 + b + k2 * x3 - lc * k1 * q
    return lam / x4, mu / x4, xi / x4


def estimation_mismatch(x, P: float, Ptilde: float, params: PlantParams,
                        cfg: ControllerConfig) -> float:
    """``gamma(x; P + Ptilde) - gamma(x; P)`` from the quadratic coefficients."""
    lam, mu, _ = gamma_quadratic_coeffs(x, params, cfg)
    return Ptilde * (lam * (2.0 * P + Ptilde) + mu)


def reference(x2: float, P: float, params: PlantParams, cfg: ControllerConfig) -> np.ndarray:
    """``xhat = (x1bar, x2bar, phi1(x2))``."""
    return np.array([target_current(params, cfg), cfg.x2bar, phi1(x2, P, params, cfg)])


def desired_damping(x2: float, P: float, params: PlantParams, cfg: ControllerConfig) -> np.ndarray:
    """Diagonal of ``R_d = diag(r1, P/x2^2 + k1, r2 + k2)``."""
    return np.array([params.r1, P / (x2 * x2) + cfg.k1, params.r2 + cfg.k2])


def error_energy(x13, P: float, params: PlantParams, cfg: ControllerConfig) -> ErrorEnergy:
    x13 = np.asarray(x13[:3], dtype=float)
    e = x13 - reference(x13[1], P, params, cfg)
    d = params.inertia[:3]
    rd = desired_damping(x13[1], P, params, cfg)
    return ErrorEnergy(e=e, V=0.5 * float(d @ (e * e)), damping=rd, dissipation=float(rd @ (e * e)))


def error_energy_rate(x, u: float, P: float, params: PlantParams, cfg: ControllerConfig) -> float:
    """Analytic ``dV/dt`` along the plant for input ``u`` (any real value)."""
    xdot = _augmented_rhs(x, u, params, P)
    b = cfg.x2bar
    ee = error_energy(x, P, params, cfg)
    ref_rate = np.array([0.0, 0.0, (2.0 * P * b / x[1] ** 3 + cfg.k1) * xdot[1]])
    return float(ee.e @ (params.inertia[:3] * (xdot[:3] - ref_rate)))


def euler_lagrange_matrices(x2: float, P: float, params: PlantParams):
    """``(D, C, R, K, G)`` of ``D dx/dt + (C + R) x = K + G w``."""
    p = params
    D = np.diag([p.L1, p.C1, p.L2])
    C = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    R = np.diag([p.r1, P / (x2 * x2), p.r2])
    K = np.array([p.E, 0.0, 0.0])
    G = np.array([0.0, 0.0, -1.0])
    return D, C, R, K, G


def cascade_w(u: float, x4: float) -> float:
    return x4 * u


def cascade_u(w: float, x4: float) -> float:
    if not x4 > V_FLOOR:
        raise VoltageCollapse("x4", x4)
    return w / x4


def sigma13(x13, w: float, params: PlantParams, P: float) -> np.ndarray:
    x1, x2, x3 = x13[0], x13[1], x13[2]
    _guard("x2", x2)
    p = params
    return np.array([
        (-p.r1 * x1 - x2 + p.E) / p.L1,
        (x1 - P / x2 - x3) / p.C1,
        (-p.r2 * x3 + x2 - w) / p.L2,
    ])


def sigma4(x4: float, x3: float, w: float, params: PlantParams) -> float:
    if not x4 > V_FLOOR:
        raise VoltageCollapse("x4", x4)
    return (-x4 / params.r3 + w * x3 / x4) / params.C2


def shunt_energy(x4: float, params: PlantParams) -> float:
    """Damper capacitor energy ``z = C2 x4^2 / 2`` [J]."""
    return 0.5 * params.C2 * x4 * x4


def shunt_energy_rate(x, P: float, params: PlantParams, cfg: ControllerConfig) -> float:
    """``dz/dt = -2 z / (r3 C2) + phi2 x3`` under the known-P feedback."""
    z = shunt_energy(x[3], params)
    return -2.0 * z / (params.r3 * params.C2) + phi2(x, P, params, cfg) * x[2]


def shunt_energy_limit(eq, params: PlantParams) -> float:
    """Steady-state value ``(r3 C2 / 2) ubar x4bar x3bar`` of ``z``."""
    xb = eq.xbar
    return 0.5 * params.r3 * params.C2 * eq.ubar * xb.x4 * xb.x3
