"""Figure scenarios, parameter sweeps, persistence and brute-force oracles."""
from ..records import RunRecord
from .config import RunConfig, default_horizon, dump_config, load_config
from .io import emit_plot_data, read_csv
from .oracles import OracleReport, oracle_check
from .scenarios import SCENARIOS, build_scenario, run_scenario
from .sweep import SweepSpec, sweep, sweep_table

__all__ = [
    "RunRecord", "RunConfig", "default_horizon", "dump_config", "load_config",
    "emit_plot_data", "read_csv", "OracleReport", "oracle_check",
    "SCENARIOS", "build_scenario", "run_scenario", "SweepSpec", "sweep", "sweep_table",
]
