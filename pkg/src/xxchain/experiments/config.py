"""Run configuration and its flat ``key = value`` file format.

A config file mirrors the field names of ChainSpec, MeasurementSchedule
and IntegratorConfig plus a few run controls::

    # N = 10 thermal dissipation with measurements every 150/J
    n_sites = 10
    J_prime = 0.05
    gamma = 0.02
    n_bar = 0.05
    noise_kind = dissipation
    measure = true
    tau = 150
    mode = nonselective
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from ..dynamics import STRANG, IntegratorConfig, NoiseModel
from ..errors import ParameterError
from ..measurement import MeasurementSchedule, scheduled_evolve
from ..model import ChainSpec

SPEC_KEYS = ("n_sites", "J", "J_prime", "gamma", "n_bar", "noise_kind", "dephasing_sites")
SCHEDULE_KEYS = ("measure", "tau", "mode", "first_at")
INTEGRATOR_KEYS = ("method", "dt", "tolerance", "max_dt")
RUN_KEYS = ("horizon", "sample_dt", "check_every", "label")
ALL_KEYS = SPEC_KEYS + SCHEDULE_KEYS + INTEGRATOR_KEYS + RUN_KEYS

# Parameters a sweep axis may vary.
SWEEPABLE = ("J_prime", "gamma", "n_bar", "tau", "n_sites", "mode")

DEFAULT_INTEGRATOR = IntegratorConfig(method=STRANG, dt=1.0, max_dt=1.0)


def default_horizon(spec):
    """Two effective half-periods, ``2 pi J / J'^2``."""
    if spec.J_prime == 0:
        raise ParameterError("default horizon needs J_prime > 0")
    return 2 * math.pi * spec.J / spec.J_prime**2


@dataclass(frozen=True)
class RunConfig:
    spec: ChainSpec = field(default_factory=ChainSpec)
    schedule: MeasurementSchedule = field(default_factory=MeasurementSchedule)
    integrator: IntegratorConfig = DEFAULT_INTEGRATOR
    horizon: Optional[float] = None
    sample_dt: float = 1.0
    check_every: Optional[float] = None
    label: str = "run"

    @property
    def t_span(self):
        return default_horizon(self.spec) if self.horizon is None else self.horizon

    @property
    def noise(self):
        return NoiseModel.from_spec(self.spec)

    def with_values(self, **values):
        """Return a copy with any of the flat config keys overridden."""
        unknown = set(values) - set(ALL_KEYS)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        spec_kw = {k: v for k, v in values.items() if k in SPEC_KEYS}
        sched_kw = {k: v for k, v in values.items() if k in SCHEDULE_KEYS}
        integ_kw = {k: v for k, v in values.items() if k in INTEGRATOR_KEYS}
        run_kw = {k: v for k, v in values.items() if k in RUN_KEYS}
        if "measure" in sched_kw:
            sched_kw["enabled"] = sched_kw.pop("measure")
        cfg = self
        if spec_kw:
            cfg = replace(cfg, spec=cfg.spec.replace(**spec_kw))
        if sched_kw:
            cfg = replace(cfg, schedule=replace(cfg.schedule, **sched_kw))
        if integ_kw:
            integ = replace(cfg.integrator, **integ_kw)
            if integ.dt > integ.max_dt:
                integ = replace(integ, max_dt=integ.dt)
            cfg = replace(cfg, integrator=integ)
        if run_kw:
            cfg = replace(cfg, **run_kw)
        return cfg

    def to_flat(self):
        s, m, i = self.spec, self.schedule, self.integrator
        return {
            "n_sites": s.n_sites, "J": s.J, "J_prime": s.J_prime, "gamma": s.gamma,
            "n_bar": s.n_bar, "noise_kind": s.noise_kind.value,
            "dephasing_sites": s.dephasing_sites.value,
            "measure": m.enabled, "tau": m.tau, "mode": m.mode.value, "first_at": m.first_at,
            "method": i.method, "dt": i.dt, "tolerance": i.tolerance, "max_dt": i.max_dt,
            "horizon": self.t_span, "sample_dt": self.sample_dt,
            "check_every": self.check_every, "label": self.label,
        }

    def run(self):
        return scheduled_evolve(
            self.spec, self.noise, self.schedule, self.integrator,
            t_span=self.t_span, sample_dt=self.sample_dt, check_every=self.check_every,
        )


_INT = {"n_sites"}
_BOOL = {"measure"}
_STR = {"noise_kind", "dephasing_sites", "mode", "method", "label"}
_OPTIONAL = {"first_at", "horizon", "check_every"}


def parse_value(key, text):
    """Convert the textual value of a config key to its Python type."""
    if key not in ALL_KEYS:
        raise ParameterError(f"unknown config key {key!r}")
    text = str(text).strip()
    if key in _OPTIONAL and text.lower() in ("", "none", "default"):
        return None
    try:
        if key in _INT:
            return int(text)
        if key in _BOOL:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if key in _STR:
            return text
        return float(text)
    except ValueError:
        raise ParameterError(f"bad value for {key}: {text!r}") from None


def parse_config_text(text):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep J vs j distinct
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ParameterError(f"malformed config: {exc}") from None
    return {k: parse_value(k, v) for k, v in parser["run"].items()}


def load_config(path, overrides=None):
    """Read a config file and apply ``overrides`` (already-typed values) on top."""
    with open(path) as fh:
        values = parse_config_text(fh.read())
    values.update(overrides or {})
    return RunConfig().with_values(**values)


def dump_config(cfg):
    lines = []
    for key, value in cfg.to_flat().items():
        if value is None:
            value = "none"
        elif isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
