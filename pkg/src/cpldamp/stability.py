"""Open-loop stability verdicts and small-matrix eigen-analysis.

The eigenvalue routine is deliberately self-contained: 2x2 matrices are solved
from trace and determinant, larger ones (up to 4x4) through the characteristic
polynomial and Durand-Kerner simultaneous iteration.
"""

from __future__ import annotations

import cmath
import math
import enum
from dataclasses import dataclass

import numpy as np

from .equilibria import open_loop_equilibria
from .plant import PlantParams, _augmented_rhs, _guard

MARGINAL_RTOL = 1e-9


class EigenvalueConvergenceError(RuntimeError):
    pass


class Regime(str, enum.Enum):
    SMALL_CAPACITANCE = "small-capacitance"
    LARGE_CAPACITANCE = "large-capacitance"


class Classification(str, enum.Enum):
    ASYMPTOTICALLY_STABLE = "asymptotically stable"
    MARGINAL = "marginal/boundary"
    UNSTABLE = "unstable"
    NO_EQUILIBRIUM = "no-equilibrium"


@dataclass(frozen=True)
class StabilityVerdict:
    regime: Regime
    necessary_bound: float
    classification: Classification
    eigenvalues: tuple[complex, ...]


def charpoly(a) -> np.ndarray:
    """Monic characteristic polynomial coefficients ``[1, c1, ..., cn]``.

    Faddeev-LeVerrier recursion.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    eye = np.eye(n)
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def polyroots(coeffs, tol: float = 1e-12, max_iter: int = 500) -> np.ndarray:
    """All roots of a monic real polynomial by Durand-Kerner iteration."""
    c = np.asarray(coeffs, dtype=float)
    n = len(c) - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    # Fujiwara-style radius, used to normalize the roots to the unit disc.
    scale = max(abs(c[k]) ** (1.0 / k) for k in range(1, n + 1))
    if scale == 0.0:
        return np.zeros(n, dtype=complex)
    # Divide k times rather than by scale**k, which can underflow.
    q = c.copy()
    for k in range(1, n + 1):
        q[k:] /= scale

    def peval(z):
        acc, bound = 0j, 0.0
        for ck in q:
            acc = acc * z + ck
            bound = bound * abs(z) + abs(ck)
        return acc, bound

    eps = np.finfo(float).eps
    z = [(0.4 + 0.9j) ** k for k in range(n)]
    for _ in range(max_iter):
        # Total-step (Jacobi) updates keep sum(z) = -q[1] after every sweep,
        # so the trace identity survives even where a multiple root limits
        # the accuracy of the individual roots.
        steps = []
        at_roundoff = True
        for i in range(n):
            denom = 1.0 + 0j
            for j in range(n):
                if j != i:
                    denom *= z[i] - z[j]
            if denom == 0:
                denom = 1e-300
            val, bound = peval(z[i])
            # Multiple roots converge only linearly; stop once every residual
            # is indistinguishable from rounding in the evaluation itself.
            at_roundoff = at_roundoff and abs(val) <= 8 * n * eps * bound
            steps.append(val / denom)
        if at_roundoff:
            # the current iterate already passed; a further step only adds noise
            break
        z = [zi - dz for zi, dz in zip(z, steps)]
        biggest = max(abs(dz) for dz in steps)
        if biggest < tol:
            break
    else:
        raise EigenvalueConvergenceError(
            f"Durand-Kerner did not converge in {max_iter} iterations (last step {biggest:.3g})")
    return _polish_clusters(np.array(z), q) * scale


def _polish_clusters(z: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Refine groups of roots that sit inside the rounding cloud of a multiple root.

    An ``m``-fold root of ``p`` is a simple root of ``p^(m-1)``, so Newton's
    method on that derivative recovers it to full precision from the cluster
    mean. Roots are assumed normalized to the unit disc.
    """
    n = len(z)
    eps = np.finfo(float).eps
    done = np.zeros(n, dtype=bool)
    z = z.copy()
    for m in range(n, 1, -1):
        tau = 100.0 * eps ** (1.0 / m)
        for i in range(n):
            if done[i]:
                continue
            d = np.abs(z - z[i])
            idx = [j for j in np.argsort(d) if not done[j]][:m]
            if len(idx) < m or d[idx[-1]] > 2 * tau:
                continue
            deriv = np.array(q, dtype=complex)
            for _ in range(m - 1):
                deriv = np.polyder(deriv)
            c = z[idx].mean()
            for _ in range(50):
                val, slope = np.polyval(deriv, c), np.polyval(np.polyder(deriv), c)
                if slope == 0:
                    break
                dc = val / slope
                c -= dc
                if abs(dc) <= 4 * eps * max(1.0, abs(c)):
                    break
            if abs(c - z[idx].mean()) <= tau:
                if abs(c.imag) <= tau and all(abs(z[j].imag) <= tau for j in idx):
                    c = complex(c.real, 0.0)
                z[idx] = c
                done[idx] = True
    return z


def eigenvalues(a) -> np.ndarray:
    """Eigenvalues of a real ``n x n`` matrix with ``n <= 4``, sorted by real part."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not 1 <= n <= 4:
        raise ValueError(f"expected a square matrix of size at most 4, got shape {a.shape}")
    if n == 1:
        roots = np.array([complex(a[0, 0])])
    elif n == 2:
        tr = a[0, 0] + a[1, 1]
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        disc = cmath.sqrt(0.25 * tr * tr - det)
        roots = np.array([0.5 * tr + disc, 0.5 * tr - disc])
    else:
        # Power-of-two scaling keeps the polynomial coefficients in range.
        amax = float(np.max(np.abs(a)))
        if amax == 0.0:
            return np.zeros(n, dtype=complex)
        s = math.ldexp(1.0, int(np.frexp(amax)[1]))
        roots = polyroots(charpoly(a / s)) * s
        # Snap conjugate pairs' numerical noise so real roots come out real.
        size = max(1.0, float(np.max(np.abs(roots))))
        roots = np.where(np.abs(roots.imag) < 1e-10 * size, roots.real + 0j, roots)
    return np.array(sorted(roots, key=lambda s: (s.real, s.imag)))


def open_loop_jacobian(v1: float, params: PlantParams, P: float) -> np.ndarray:
    _guard("v1", v1)
    p = params
    return np.array([
        [-p.r1 / p.L1, -1.0 / p.L1],
        [1.0 / p.C1, P / (p.C1 * v1 * v1)],
    ])


def jacobian(x, u: float, params: PlantParams, P: float) -> np.ndarray:
    """Analytic Jacobian of the damper-equipped model at fixed duty cycle."""
    x1, x2, x3, x4 = np.asarray(x.as_array() if hasattr(x, "as_array") else x, dtype=float)
    _guard("x2", x2)
    p = params
    return np.array([
        [-p.r1 / p.L1, -1.0 / p.L1, 0.0, 0.0],
        [1.0 / p.C1, P / (p.C1 * x2 * x2), -1.0 / p.C1, 0.0],
        [0.0, 1.0 / p.L2, -p.r2 / p.L2, -u / p.L2],
        [0.0, 0.0, u / p.C2, -1.0 / (p.r3 * p.C2)],
    ])


def numerical_jacobian(func, x) -> np.ndarray:
    """Central-difference Jacobian with step ``1e-6 * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(len(x)):
        h = 1e-6 * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((np.asarray(func(xp)) - np.asarray(func(xm))) / (2 * h))
    return np.column_stack(cols)


def feedback_jacobian(x, control, params: PlantParams, P: float) -> np.ndarray:
    """Jacobian of ``x -> f(x) + g(x) control(x)`` (unsaturated feedback)."""
    return numerical_jacobian(lambda y: _augmented_rhs(y, control(y), params, P), x)


def open_loop_bound(params: PlantParams) -> tuple[Regime, float]:
    p = params
    if p.C1 < p.L1 / p.r1**2:
        bound = p.E**2 * p.C1 * p.L1 * p.r1 / (p.L1 + p.C1 * p.r1**2) ** 2
        return Regime.SMALL_CAPACITANCE, bound
    return Regime.LARGE_CAPACITANCE, p.E**2 / (4.0 * p.r1)


def open_loop_stability(params: PlantParams, P: float) -> StabilityVerdict:
    """Classify the high-voltage open-loop equilibrium for load power ``P``.

    The classification comes from the closed-form power bound; the eigenvalues
    of the 2x2 Jacobian at the equilibrium are attached as corroboration.
    """
    regime, bound = open_loop_bound(params)
    eq = open_loop_equilibria(params, P)
    if eq.high is None:
        return StabilityVerdict(regime, bound, Classification.NO_EQUILIBRIUM, ())
    eigs = tuple(complex(s) for s in eigenvalues(open_loop_jacobian(eq.high.v1, params, P)))
    if abs(P - bound) <= MARGINAL_RTOL * bound:
        cls = Classification.MARGINAL
    elif P < bound:
        cls = Classification.ASYMPTOTICALLY_STABLE
    else:
        cls = Classification.UNSTABLE
    return StabilityVerdict(regime, bound, cls, eigs)
