"""Random circuit/state generators shared by the tests."""

import numpy as np
from hypothesis import strategies as st

from cpldamp.control import ControllerConfig
from cpldamp.equilibria import power_window
from cpldamp.plant import PlantParams


def random_params(rng: np.random.Generator) -> PlantParams:
    """Reference circuit with every element scaled by a factor in [1/3, 3]."""
    ref = PlantParams.reference()
    scale = np.exp(rng.uniform(np.log(1 / 3), np.log(3), size=8))
    return PlantParams(*(v * s for v, s in zip(
        (ref.r1, ref.L1, ref.C1, ref.E, ref.r2, ref.L2, ref.C2, ref.r3), scale)))


def random_triple(rng: np.random.Generator, margin: float = 0.01):
    """``(params, P, x2bar)`` with ``P >= 0`` strictly inside the window."""
    while True:
        p = random_params(rng)
        x2bar = rng.uniform(0.05, 0.95) * p.E
        lo, hi = power_window(p, x2bar)
        lo = max(lo, 0.0)
        width = hi - lo
        if width <= 0:
            continue
        P = rng.uniform(lo + margin * width, hi - margin * width)
        return p, P, x2bar


def random_controller(rng: np.random.Generator, x2bar: float) -> ControllerConfig:
    return ControllerConfig(k1=rng.uniform(0, 100), k2=rng.uniform(0, 5), x2bar=x2bar)


@st.composite
def states(draw, lo_v=0.5, hi_v=800.0):
    x1 = draw(st.floats(-100, 100))
    x2 = draw(st.floats(lo_v, 50))
    x3 = draw(st.floats(-100, 100))
    x4 = draw(st.floats(lo_v, hi_v))
    return np.array([x1, x2, x3, x4])


powers = st.floats(0, 600)
duties = st.floats(0, 1)
