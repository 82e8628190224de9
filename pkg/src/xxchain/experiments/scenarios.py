"""Catalog of the figure scenarios: parameter sets, curves and output layout."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..measurement import MeasurementSchedule
from ..model import ChainSpec
from .config import RunConfig
from .io import emit_plot_data, write_table_csv
from .sweep import SweepSpec, sweep, sweep_table

TAU_OPT = 150.0


def _cfg(label, measure=False, tau=TAU_OPT, horizon=None, **spec_kw):
    spec_kw.setdefault("n_sites", 10)
    spec_kw.setdefault("J_prime", 0.05)
    return RunConfig(
        spec=ChainSpec(**spec_kw),
        schedule=MeasurementSchedule(enabled=measure, tau=tau),
        horizon=horizon,
        label=label,
    )


def paired(label_base, tau=TAU_OPT, horizon=None, **spec_kw):
    """With- and without-measurement curves on a shared time grid."""
    return {
        "measured": _cfg(f"{label_base}-measured", True, tau, horizon, **spec_kw),
        "unmeasured": _cfg(f"{label_base}-unmeasured", False, tau, horizon, **spec_kw),
    }


@dataclass
class Scenario:
    name: str
    description: str
    curves: dict = field(default_factory=dict)  # curve name -> RunConfig
    sweeps: dict = field(default_factory=dict)  # table name -> SweepSpec


FIG1A_RATIOS = (0.01, 0.02, 0.03, 0.04, 0.05, 0.075, 0.1, 0.15, 0.2)
FIG2_TAUS = (10.0, 25.0, 50.0, 100.0, 150.0, 200.0, 300.0, 500.0)
FIG5A_GAMMAS = (0.0, 0.005, 0.01, 0.02, 0.03, 0.05)
FIG5B_EVEN = (4, 6, 8, 10)
FIG5B_ODD = (5, 7, 9, 11)
THERMAL = dict(noise_kind="dissipation", n_bar=0.05)


def build_scenario(name):
    if name == "fig1a":
        # Each J' gets its own default horizon 2 pi J / J'^2.
        base = _cfg("fig1a")
        return Scenario(name, "max end-to-end concurrence vs J'/J, gamma = 0, N = 10",
                        sweeps={"max_vs_jprime": SweepSpec(base, (("J_prime", FIG1A_RATIOS),))})
    if name == "fig1b":
        return Scenario(name, "C(t) at J' = 0.05 J, gamma = 0, N = 10",
                        curves={"unmeasured": _cfg("fig1b")})
    if name in ("fig2a", "fig2b"):
        spec_kw = {} if name == "fig2a" else dict(gamma=0.05, **THERMAL)
        base = _cfg(name, measure=True, **spec_kw)
        axes = (("tau", FIG2_TAUS), ("mode", ("nonselective", "selective")))
        return Scenario(name, "max concurrence vs measurement interval J tau",
                        sweeps={"max_vs_tau": SweepSpec(base, axes)})
    if name == "fig3":
        return Scenario(name, "C(t) with/without measurement, gamma = 0.02, n_bar = 0.05, tau = 150",
                        curves=paired(name, gamma=0.02, **THERMAL))
    if name == "fig4":
        return Scenario(name, "C(t) with/without measurement, gamma = 0.02, n_bar = 0.1, tau = 150",
                        curves=paired(name, gamma=0.02, noise_kind="dissipation", n_bar=0.1))
    if name == "fig5a":
        base = _cfg(name, **THERMAL)
        axes = (("gamma", FIG5A_GAMMAS),)
        measured = SweepSpec(base.with_values(measure=True), axes)
        unmeasured = SweepSpec(base, axes)
        return Scenario(name, "max concurrence vs gamma, N = 10",
                        sweeps={"measured": measured, "unmeasured": unmeasured})
    if name == "fig5b":
        # Odd chains have no effective coupling; they share the N = 10 horizon.
        horizon = 2 * np.pi / 0.05**2
        base = _cfg(name, horizon=horizon, gamma=0.02, **THERMAL)
        sweeps = {}
        for parity, sizes in (("even", FIG5B_EVEN), ("odd", FIG5B_ODD)):
            axes = (("n_sites", sizes),)
            sweeps[f"{parity}_measured"] = SweepSpec(base.with_values(measure=True), axes)
            sweeps[f"{parity}_unmeasured"] = SweepSpec(base, axes)
        return Scenario(name, "max concurrence vs chain length, gamma = 0.02", sweeps=sweeps)
    if name == "fig6":
        return Scenario(name, "C(t) with/without measurement under dephasing, gamma = 0.02, tau = 500",
                        curves=paired(name, tau=500.0, gamma=0.02, noise_kind="dephasing"))
    raise KeyError(name)


SCENARIOS = ("fig1a", "fig1b", "fig2a", "fig2b", "fig3", "fig4", "fig5a", "fig5b", "fig6")


def run_scenario(name, out_dir="results", workers=1, log=None):
    """Run a scenario and write ``<out>/<name>/<curve>.csv`` plus ``meta.json``."""
    scenario = build_scenario(name)
    target = Path(out_dir) / name
    records = {}
    for curve, cfg in scenario.curves.items():
        if log:
            log(f"{name}: {curve}")
        records[curve] = cfg.run()
    tables = {}
    for table, spec in scenario.sweeps.items():
        if log:
            log(f"{name}: sweep {table} ({spec.size} points)")
        tables[table] = sweep_table(sweep(spec, workers=workers))
    files = emit_plot_data(records, target, extra={
        "scenario": name,
        "description": scenario.description,
        "configs": {c: cfg.to_flat() for c, cfg in scenario.curves.items()},
        "sweeps": {t: {"base": s.base.to_flat(), "axes": [[n, list(v)] for n, v in s.axes]}
                   for t, s in scenario.sweeps.items()},
        "tables": tables,
    })
    for table, rows in tables.items():
        files.append(write_table_csv(rows, target / f"{table}.csv"))
    return records, tables, files
