"""Chain parameters, Hamiltonians, initial state and analytic reference models."""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, UnsupportedError
from .quantum_core import (
    MAX_SITES,
    SIGMA_MINUS,
    SIGMA_PLUS,
    DensityMatrix,
    QuantumOperator,
    embed_site_operator,
)


class NoiseKind(str, enum.Enum):
    NONE = "none"
    DISSIPATION = "dissipation"
    DEPHASING = "dephasing"


class DephasingRange(str, enum.Enum):
    ALL_CHANNEL = "all_channel"  # sites 2..N-1, same as dissipation
    PAPER_LITERAL = "paper_literal"  # sites 2..N-2


@dataclass(frozen=True)
class ChainSpec:
    """Physical parameters of one chain run (energies in units of J)."""

    n_sites: int = 10
    J: float = 1.0
    J_prime: float = 0.05
    gamma: float = 0.0
    n_bar: float = 0.0
    noise_kind: NoiseKind = NoiseKind.NONE
    dephasing_sites: DephasingRange = DephasingRange.ALL_CHANNEL

    def __post_init__(self):
        object.__setattr__(self, "noise_kind", NoiseKind(self.noise_kind))
        object.__setattr__(self, "dephasing_sites", DephasingRange(self.dephasing_sites))
        if int(self.n_sites) != self.n_sites or not 4 <= self.n_sites <= MAX_SITES:
            raise ParameterError(f"n_sites must be an integer in 4..{MAX_SITES}, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if not self.J > 0:
            raise ParameterError(f"J must be positive, got {self.J}")
        if self.J_prime < 0 or self.J_prime > self.J:
            raise ParameterError(f"J_prime must lie in [0, J], got {self.J_prime}")
        if self.gamma < 0 or self.n_bar < 0:
            raise ParameterError("gamma and n_bar must be nonnegative")
        if self.gamma > 0 and self.noise_kind is NoiseKind.NONE:
            # A rate with no channel to act on is almost always a config slip.
            raise ParameterError("gamma > 0 needs noise_kind 'dissipation' or 'dephasing'")

    @property
    def channel_sites(self):
        return list(range(2, self.n_sites))

    @property
    def jump_sites(self):
        if self.noise_kind is NoiseKind.DEPHASING and self.dephasing_sites is DephasingRange.PAPER_LITERAL:
            return list(range(2, self.n_sites - 1))
        return self.channel_sites

    def replace(self, **changes):
        data = asdict(self)
        data.update(changes)
        return ChainSpec(**data)

    def to_dict(self):
        d = asdict(self)
        d["noise_kind"] = self.noise_kind.value
        d["dephasing_sites"] = self.dephasing_sites.value
        return d

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ParameterError(f"unknown ChainSpec fields: {sorted(unknown)}")
        return cls(**data)


def hopping(site_a, site_b, n_sites):
    """``sigma+_a sigma-_b + sigma-_a sigma+_b``."""
    up_a = embed_site_operator(SIGMA_PLUS, site_a, n_sites)
    dn_a = embed_site_operator(SIGMA_MINUS, site_a, n_sites)
    up_b = embed_site_operator(SIGMA_PLUS, site_b, n_sites)
    dn_b = embed_site_operator(SIGMA_MINUS, site_b, n_sites)
    return up_a @ dn_b + dn_a @ up_b


def build_channel_hamiltonian(spec):
    """Nearest-neighbour XX hopping on the channel sites 2..N-1."""
    n = spec.n_sites
    H = QuantumOperator.zero(n)
    for k in range(2, n - 1):
        H = H + spec.J * hopping(k, k + 1, n)
    return H


def build_interaction_hamiltonian(spec):
    """Weak XX coupling of the sender (site 1) and receiver (site N) to the channel."""
    n = spec.n_sites
    return spec.J_prime * (hopping(1, 2, n) + hopping(n - 1, n, n))


def total_hamiltonian(spec):
    return build_channel_hamiltonian(spec) + build_interaction_hamiltonian(spec)


def excitation_number(n_sites):
    """Diagonal operator counting excited sites."""
    counts = np.array([bin(i).count("1") for i in range(2**n_sites)], dtype=complex)
    return QuantumOperator(n_sites, sp.diags(counts, format="csr"))


PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def initial_ket(spec):
    zero_channel = np.zeros(2 ** (spec.n_sites - 2), dtype=complex)
    zero_channel[0] = 1.0
    return np.kron(np.kron(PLUS, zero_channel), PLUS)


def initial_state(spec):
    """``|+><+|`` on the end qubits, empty channel in between."""
    return DensityMatrix.from_ket(initial_ket(spec))


def effective_coupling(spec):
    """Second-order end-to-end coupling ``(-1)**(N/2) J'**2 / J`` (even N only)."""
    if spec.n_sites % 2:
        raise UnsupportedError(
            f"effective coupling is defined for even chain lengths only (got N={spec.n_sites})"
        )
    sign = -1.0 if (spec.n_sites // 2) % 2 else 1.0
    return sign * spec.J_prime**2 / spec.J


def effective_model_concurrence(t, J_e):
    """Concurrence of ``|++>`` evolved for time ``t`` under the two-qubit effective XX coupling."""
    return np.abs(np.sin(J_e * np.asarray(t, dtype=float)))


def effective_period(J_e):
    """Period of ``|sin(J_e t)|``."""
    return np.pi / abs(J_e)


class XXCouplings(NamedTuple):
    J_z: float
    J_perp: float


def hubbard_to_xx(J_up, J_down, U_up, U_down, U_updown):
    """Effective spin couplings of the two-species Mott insulator, as printed.

    ``J_perp`` is first order in the tunnelings; the usual superexchange
    result is second order, but the printed form is kept.
    """
    if min(U_up, U_down, U_updown) <= 0:
        raise ParameterError("interaction energies U must be positive")
    J_z = (J_up**2 + J_down**2) / (2 * U_updown) - J_up**2 / U_up - J_down**2 / U_down
    J_perp = (J_up + J_down) / U_updown
    return XXCouplings(J_z, J_perp)
