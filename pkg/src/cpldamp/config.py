"""Sectioned ``key = value`` run configuration with a strict schema.

Example::

    [plant]
    E = 24.0

    [controller]
    mode = adaptive        ; adaptive | known-P | open-loop
    k1 = 30
    k2 = 0.78
    x2bar = 12             ; defaults to E/2

    [estimator]
    k3 = 1000
    Phat0 = 0

    [scenario]
    P0 = 100
    events = 1e-6:479      ; comma-separated time:power pairs
    t_end = 1.0
    initial_state = equilibrium   ; or x1, x2, x3, x4 (i1, v1 in open loop)
    method = adaptive-RK45
    rtol = 1e-8

Every section is optional. Missing keys take the reference circuit values and
the default gains; unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields

from .control import ADAPTIVE, KNOWN_P, ControllerConfig
from .equilibria import PowerOutsideWindow, assignable_equilibrium, open_loop_equilibria
from .estimator import EstimatorConfig
from .integrators import IntegratorConfig
from .plant import NetworkState, OpenLoopState, PlantParams
from .sim import Scenario

ENV_VAR = "CPLDAMP_CONFIG"
OPEN_LOOP = "open-loop"


class ConfigError(ValueError):
    pass


_FLOAT_FIELDS = {
    "plant": {f.name for f in fields(PlantParams)},
    "controller": {"k1", "k2", "x2bar"},
    "estimator": {"k3", "Phat0"},
    "scenario": {"P0", "t_end", "dt", "rtol", "atol", "dt_min", "dt_max"},
}
_OTHER_FIELDS = {
    "plant": set(),
    "controller": {"mode"},
    "estimator": {"clamp"},
    "scenario": {"events", "initial_state", "method", "output_stride"},
}

DEFAULT_SCENARIO = {"P0": 100.0, "events": "1e-6:479", "t_end": 1.0, "initial_state": "equilibrium"}


@dataclass(frozen=True)
class RunConfig:
    params: PlantParams
    controller: ControllerConfig | None
    estimator: EstimatorConfig
    scenario: Scenario


def _parse_events(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        t, sep, P = item.partition(":")
        if not sep:
            raise ConfigError(f"event {item!r} is not of the form time:power")
        out.append((float(t), float(P)))
    return tuple(out)


def _read(parser: configparser.ConfigParser) -> dict[str, dict[str, object]]:
    sections = {}
    for name in parser.sections():
        if name not in _FLOAT_FIELDS:
            raise ConfigError(f"unknown section [{name}]")
        values = {}
        for key, raw in parser.items(name):
            if key in _FLOAT_FIELDS[name]:
                try:
                    values[key] = float(raw)
                except ValueError:
                    raise ConfigError(f"[{name}] {key} = {raw!r} is not a number") from None
            elif key in _OTHER_FIELDS[name]:
                values[key] = raw.strip()
            else:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
        sections[name] = values
    return sections


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keys are case-sensitive (L1 vs l1)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    try:
        return build(_read(parser))
    except (ConfigError, PowerOutsideWindow):
        raise
    except (ValueError, TypeError, LookupError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    """Load ``path``, else the file named by ``$CPLDAMP_CONFIG``, else defaults."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return build({})
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def build(sections: dict[str, dict[str, object]]) -> RunConfig:
    ref = PlantParams.reference()
    plant = {f.name: getattr(ref, f.name) for f in fields(PlantParams)}
    plant.update(sections.get("plant", {}))
    params = PlantParams(**plant)

    c = dict(sections.get("controller", {}))
    mode = c.pop("mode", ADAPTIVE)
    c.setdefault("x2bar", params.E / 2.0)
    controller = None if mode == OPEN_LOOP else ControllerConfig(mode=mode, **c)

    e = dict(sections.get("estimator", {}))
    if "clamp" in e:
        e["clamp"] = str(e["clamp"]).lower() in ("1", "true", "yes", "on")
    estimator = EstimatorConfig(**e)

    s = {**DEFAULT_SCENARIO, **sections.get("scenario", {})}
    integ = {k: s.pop(k) for k in ("method", "dt", "rtol", "atol", "dt_min", "dt_max") if k in s}
    P0 = float(s["P0"])
    init = str(s["initial_state"])
    if init == "equilibrium":
        if controller is None:
            initial = open_loop_equilibria(params, P0).high
            if initial is None:
                raise ConfigError(f"no open-loop equilibrium at P0 = {P0:g} W")
        else:
            initial = assignable_equilibrium(params, P0, controller.x2bar).xbar
    else:
        vals = [float(v) for v in init.split(",")]
        initial = OpenLoopState(*vals) if controller is None else NetworkState(*vals)
    scenario = Scenario(
        params=params,
        initial_state=initial,
        P0=P0,
        controller=controller,
        estimator=estimator if controller is not None and controller.mode == ADAPTIVE else None,
        events=_parse_events(str(s["events"])),
        t_end=float(s["t_end"]),
        integrator=IntegratorConfig(**integ),
        output_stride=int(s.get("output_stride", 10)),
    )
    return RunConfig(params, controller, estimator, scenario)


__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "ENV_VAR",
           "OPEN_LOOP", "KNOWN_P", "ADAPTIVE"]
