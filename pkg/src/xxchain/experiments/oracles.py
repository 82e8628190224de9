"""Brute-force cross-checks of the integrators and the effective model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ..dynamics import IntegratorConfig, NoiseModel, evolve
from ..entanglement import concurrence_from_array
from ..errors import ParameterError
from ..measurement import MeasurementSchedule, scheduled_evolve
from ..model import (
    ChainSpec,
    NoiseKind,
    effective_coupling,
    effective_model_concurrence,
    initial_state,
    total_hamiltonian,
)
from ..quantum_core import DensityMatrix, QuantumOperator
from .config import DEFAULT_INTEGRATOR

KINDS = ("liouvillian_n4", "single_qubit_steady", "effective_model")


@dataclass
class OracleReport:
    kind: str
    max_deviation: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.max_deviation <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.kind}: max_deviation={self.max_deviation:.3e} (tolerance {self.tolerance:g})"


def _site_op(local, site, n):
    ops = [np.eye(2)] * n
    ops[site - 1] = local
    out = np.ones((1, 1))
    for o in ops:
        out = np.kron(out, o)
    return out


def dense_liouvillian(H, jumps):
    """Liouvillian acting on row-major ``vec(rho)``; ``vec(A rho B) = (A kron B^T) vec(rho)``."""
    d = H.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for rate, J in jumps:
        JdJ = J.conj().T @ J
        L += rate * (np.kron(J, J.conj()) - 0.5 * np.kron(JdJ, eye) - 0.5 * np.kron(eye, JdJ.T))
    return L


def chain_liouvillian(spec):
    """Independent dense construction of the chain's master-equation generator."""
    n = spec.n_sites
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    sp_ = sm.T
    sz = np.diag([-1.0, 1.0]).astype(complex)
    H = np.zeros((2**n, 2**n), dtype=complex)
    for k in range(1, n):
        c = spec.J_prime if k in (1, n - 1) else spec.J
        H += c * (_site_op(sp_, k, n) @ _site_op(sm, k + 1, n) + _site_op(sm, k, n) @ _site_op(sp_, k + 1, n))
    jumps = []
    if spec.noise_kind is NoiseKind.DISSIPATION:
        for k in spec.jump_sites:
            jumps.append((spec.gamma * (spec.n_bar + 1), _site_op(sm, k, n)))
            jumps.append((spec.gamma * spec.n_bar, _site_op(sp_, k, n)))
    elif spec.noise_kind is NoiseKind.DEPHASING:
        for k in spec.jump_sites:
            jumps.append((spec.gamma, _site_op(sz, k, n)))
    return dense_liouvillian(H, jumps)


def liouvillian_check(config=None, times=(1.0, 10.0, 100.0), tolerance=1e-6):
    config = config or IntegratorConfig()
    cases = {
        "dissipation": ChainSpec(4, J_prime=0.05, gamma=0.05, n_bar=0.1, noise_kind="dissipation"),
        "dephasing": ChainSpec(4, J_prime=0.05, gamma=0.05, noise_kind="dephasing"),
    }
    details = {}
    worst = 0.0
    for name, spec in cases.items():
        rho0 = initial_state(spec)
        Lv = chain_liouvillian(spec)
        got = dict(evolve(rho0, total_hamiltonian(spec), NoiseModel.from_spec(spec), config,
                          t_span=max(times), sample_dt=min(times)))
        devs = {}
        for t in times:
            exact = (sla.expm(Lv * t) @ rho0.data.ravel()).reshape(rho0.data.shape)
            devs[t] = float(np.abs(got[t].data - exact).max())
        details[name] = devs
        worst = max(worst, *devs.values())
    details["method"] = config.method
    return OracleReport("liouvillian_n4", worst, tolerance, details)


def thermal_population(n_bar):
    return n_bar / (2 * n_bar + 1)


def single_qubit_check(n_bar=0.05, gamma=0.05, config=None, tolerance=1e-6):
    """Single damped qubit: transient against the closed-form rate solution, then the steady state."""
    config = config or IntegratorConfig()
    H = QuantumOperator.zero(1)
    noise = NoiseModel("dissipation", gamma, n_bar, (1,))
    excited = DensityMatrix(1, np.diag([0.0, 1.0]))
    rate = gamma * (2 * n_bar + 1)
    p_ss = thermal_population(n_bar)
    t_relax = 1.0 / gamma
    t_long = 20.0 / rate
    out = dict(evolve(excited, H, noise, config, t_span=t_long, sample_dt=t_relax))
    t_probe = t_relax
    p_transient = float(out[t_probe].data[1, 1].real)
    p_exact = p_ss + (1 - p_ss) * np.exp(-rate * t_probe)
    t_end = max(out)
    p_end = float(out[t_end].data[1, 1].real)
    p_end_exact = p_ss + (1 - p_ss) * np.exp(-rate * t_end)
    dev = max(abs(p_transient - p_exact), abs(p_end - p_ss), abs(p_end - p_end_exact))
    return OracleReport("single_qubit_steady", dev, tolerance, {
        "n_bar": n_bar, "gamma": gamma, "p1_final": p_end, "p1_expected": p_ss,
        "p1_transient": p_transient, "p1_transient_expected": p_exact, "t_final": t_end,
    })


def effective_model_check(n_sites=8, J_prime=0.05, config=None, tolerance=0.1):
    """Sup-norm gap between the full gamma=0 curve and ``|sin(J_e t)|`` over one effective period."""
    spec = ChainSpec(n_sites, J_prime=J_prime)
    J_e = effective_coupling(spec)
    horizon = np.pi / abs(J_e)
    record = scheduled_evolve(spec, schedule=MeasurementSchedule(enabled=False),
                              config=config or DEFAULT_INTEGRATOR, t_span=horizon, sample_dt=1.0)
    model = effective_model_concurrence(record.times, J_e)
    dev = float(np.abs(record.concurrence - model).max())
    first_peak = np.pi / (2 * abs(J_e))
    return OracleReport("effective_model", dev, tolerance, {
        "n_sites": n_sites, "J_e": J_e, "max_concurrence": record.max_concurrence,
        "t_of_max": record.t_of_max, "predicted_t_of_max": first_peak,
    })


def oracle_check(kind, **kwargs):
    """Run one named cross-check; failures are reported in the result, never raised."""
    if kind == "liouvillian_n4":
        return liouvillian_check(**kwargs)
    if kind == "single_qubit_steady":
        return single_qubit_check(**kwargs)
    if kind == "effective_model":
        return effective_model_check(**kwargs)
    raise ParameterError(f"unknown oracle {kind!r}; choose from {KINDS}")
