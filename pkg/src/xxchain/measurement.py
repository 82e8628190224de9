"""Global projective measurement of the channel and its periodic application."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .dynamics import IntegratorConfig, NoiseModel, evolve
from .entanglement import concurrence_from_array
from .errors import MeasurementFailure, ParameterError
from .model import initial_state, total_hamiltonian
from .quantum_core import DensityMatrix, QuantumOperator, check_density
from .records import RunRecord

FAILURE_THRESHOLD = 1e-12


class MeasurementMode(str, enum.Enum):
    NONSELECTIVE = "nonselective"
    SELECTIVE = "selective"


@dataclass(frozen=True)
class MeasurementSchedule:
    """Projective channel measurements at ``first_at, first_at + tau, ...``."""

    enabled: bool = False
    tau: float = 150.0
    mode: MeasurementMode = MeasurementMode.NONSELECTIVE
    first_at: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", MeasurementMode(self.mode))
        if not self.tau > 0:
            raise ParameterError(f"measurement interval tau must be positive, got {self.tau}")
        if self.first_at is not None and self.first_at < 0:
            raise ParameterError("first_at must be nonnegative")

    @property
    def start(self):
        return self.tau if self.first_at is None else self.first_at

    def event_times(self, t_span):
        if not self.enabled:
            return []
        n = int(np.floor((t_span - self.start) / self.tau + 1e-9))
        return [self.start + j * self.tau for j in range(max(n + 1, 0))]

    def zeno_warning(self, J_prime):
        """True when measurements are at least as frequent as the boundary ``1/J'``."""
        return bool(self.enabled and J_prime > 0 and self.tau <= 1.0 / J_prime)

    def to_dict(self):
        return {"enabled": self.enabled, "tau": self.tau, "mode": self.mode.value,
                "first_at": self.first_at}


def empty_channel_mask(n_sites):
    """Boolean vector over the natural basis: True where sites 2..N-1 are all empty."""
    channel_bits = (1 << (n_sites - 1)) - 2
    return (np.arange(2**n_sites) & channel_bits) == 0


def channel_projector(n_sites):
    """``M0`` onto the empty channel (ends untouched) and its complement ``M1 = I - M0``."""
    if n_sites < 4:
        raise ParameterError("channel projector needs at least 4 sites")
    mask = empty_channel_mask(n_sites).astype(complex)
    M0 = QuantumOperator(n_sites, sp.diags(mask, format="csr"))
    return M0, QuantumOperator.identity(n_sites) - M0


@dataclass(frozen=True)
class MeasurementOutcome:
    state: DensityMatrix
    prob_empty: float


def _project(rho, mask, mode):
    """Apply the measurement in place to ``rho`` whose basis is described by ``mask``."""
    prob = float(np.real(np.diagonal(rho)[mask].sum()))
    if mode is MeasurementMode.NONSELECTIVE:
        rho *= mask[:, None] == mask[None, :]
    else:
        if prob < FAILURE_THRESHOLD:
            raise MeasurementFailure(f"empty-channel outcome has probability {prob:.3e}")
        rho *= np.logical_and(mask[:, None], mask[None, :]) / prob
    return min(max(prob, 0.0), 1.0)


def apply_measurement(rho, mode=MeasurementMode.NONSELECTIVE):
    """Measure ``{M0, M1}`` on the channel of a full chain state.

    Non-selective: ``M0 rho M0 + M1 rho M1``. Selective: keep the empty
    channel outcome, ``M0 rho M0 / p``. ``prob_empty`` is ``tr(M0 rho M0)``.
    """
    mode = MeasurementMode(mode)
    data = np.array(rho.data)
    prob = _project(data, empty_channel_mask(rho.n_sites), mode)
    return MeasurementOutcome(DensityMatrix(rho.n_sites, data), prob)


def scheduled_evolve(spec, noise=None, schedule=None, config=None, t_span=1000.0, sample_dt=1.0,
                     rho0=None, check_every=None):
    """Evolve the chain with periodic channel measurements and record the end-to-end concurrence.

    ``check_every`` (time units) adds full-state validity checks (trace,
    Hermiticity, smallest eigenvalue); a check is always made at the end.
    """
    noise = NoiseModel.from_spec(spec) if noise is None else noise
    schedule = schedule or MeasurementSchedule()
    config = config or IntegratorConfig()
    H = total_hamiltonian(spec)
    rho0 = initial_state(spec) if rho0 is None else rho0
    n = spec.n_sites
    ends = [1, n]
    events = []
    checks = []
    mask_cache = {}
    check_times = set()
    if check_every:
        check_times = {round(k * check_every / sample_dt) for k in range(1, int(t_span // check_every) + 1)}
    last_sample = int(np.floor(t_span / sample_dt + 1e-9))
    check_times.add(last_sample)

    def on_event(t, state):
        if "mask" not in mask_cache:
            mask_cache["mask"] = empty_channel_mask(n)[state.order]
        events.append((t, _project(state.rho, mask_cache["mask"], schedule.mode)))

    def observer(t, state):
        conc = concurrence_from_array(state.reduced(ends)).value
        if round(t / sample_dt) in check_times:
            checks.append((t, check_density(state.rho)))
        return conc, abs(state.trace() - 1.0), state.purity()

    out = evolve(rho0, H, noise, config, t_span, sample_dt, observer,
                 event_times=schedule.event_times(t_span), on_event=on_event)
    times = [t for t, _ in out]
    conc, trace_err, purity = (np.array(col) for col in zip(*(o for _, o in out)))
    cumulative = float(np.prod([p for _, p in events])) if schedule.mode is MeasurementMode.SELECTIVE else 1.0
    return RunRecord(
        spec=spec, noise=noise, schedule=schedule, config=config,
        times=times, concurrence=conc, trace_error=trace_err, purity=purity,
        measurement_events=events, cumulative_success=cumulative,
        zeno_warning=schedule.zeno_warning(spec.J_prime), checks=checks,
    )
