"""Operator and state algebra on n-qubit Hilbert spaces.

Basis convention: site 1 is the most significant bit of the computational
basis index, ``|1>`` is the excited state, ``sigma_minus = |0><1|`` and
``sigma_z = |1><1| - |0><0|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError

MAX_SITES = 14

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
PROJ_EXCITED = np.array([[0, 0], [0, 1]], dtype=complex)


def _check_n_sites(n_sites):
    if int(n_sites) != n_sites or not 1 <= n_sites <= MAX_SITES:
        raise ParameterError(f"n_sites must be an integer in 1..{MAX_SITES}, got {n_sites}")
    return int(n_sites)


@dataclass(frozen=True, eq=False)
class QuantumOperator:
    """Sparse linear operator on the ``2**n_sites`` dimensional chain space."""

    n_sites: int
    matrix: sp.csr_matrix

    def __post_init__(self):
        n = _check_n_sites(self.n_sites)
        m = sp.csr_matrix(self.matrix, dtype=complex)
        if m.shape != (2**n, 2**n):
            raise ParameterError(f"operator shape {m.shape} does not match n_sites={n}")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return 2**self.n_sites

    def _check_other(self, other):
        if not isinstance(other, QuantumOperator):
            return NotImplemented
        if other.n_sites != self.n_sites:
            raise ParameterError(
                f"n_sites mismatch: {self.n_sites} vs {other.n_sites}"
            )
        return other

    def __add__(self, other):
        if self._check_other(other) is NotImplemented:
            return NotImplemented
        return QuantumOperator(self.n_sites, self.matrix + other.matrix)

    def __sub__(self, other):
        if self._check_other(other) is NotImplemented:
            return NotImplemented
        return QuantumOperator(self.n_sites, self.matrix - other.matrix)

    def __neg__(self):
        return QuantumOperator(self.n_sites, -self.matrix)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return QuantumOperator(self.n_sites, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, QuantumOperator):
            self._check_other(other)
            return QuantumOperator(self.n_sites, self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other)

    def dag(self):
        return QuantumOperator(self.n_sites, self.matrix.conj().T)

    def toarray(self):
        return self.matrix.toarray()

    def commutator(self, other):
        return self @ other - other @ self

    def norm(self):
        """Largest absolute matrix element (0 for the zero operator)."""
        data = self.matrix.data
        return float(np.abs(data).max()) if data.size else 0.0

    @classmethod
    def zero(cls, n_sites):
        d = 2 ** _check_n_sites(n_sites)
        return cls(n_sites, sp.csr_matrix((d, d), dtype=complex))

    @classmethod
    def identity(cls, n_sites):
        return cls(n_sites, sp.identity(2 ** _check_n_sites(n_sites), dtype=complex, format="csr"))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense density matrix of ``n_sites`` qubits. The stored array is read-only."""

    n_sites: int
    data: np.ndarray

    def __post_init__(self):
        n = _check_n_sites(self.n_sites)
        arr = np.array(self.data, dtype=complex)
        if arr.shape != (2**n, 2**n):
            raise ParameterError(f"density matrix shape {arr.shape} does not match n_sites={n}")
        arr.flags.writeable = False
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_ket(cls, psi):
        psi = np.asarray(psi, dtype=complex).ravel()
        n = int(round(np.log2(psi.size)))
        if 2**n != psi.size:
            raise ParameterError(f"ket length {psi.size} is not a power of two")
        return cls(n, np.outer(psi, psi.conj()))

    @property
    def dim(self):
        return 2**self.n_sites

    def trace(self):
        return complex(np.trace(self.data))

    def purity(self):
        return float(np.vdot(self.data, self.data).real)


def as_array(rho):
    """Return the raw matrix of a DensityMatrix, QuantumOperator or array."""
    if isinstance(rho, DensityMatrix):
        return rho.data
    if isinstance(rho, QuantumOperator):
        return rho.toarray()
    return np.asarray(rho)


def basis_ket(bits):
    """Computational basis vector for a bit string such as ``"0100"`` or ``[0, 1, 0, 0]``."""
    bits = [int(b) for b in bits]
    index = int("".join(map(str, bits)), 2)
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[index] = 1.0
    return psi


def kron_all(*factors):
    out = np.ones((1,) * np.ndim(factors[0]), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def embed_site_operator(local_op, site, n_sites):
    """Place a 2x2 operator on ``site`` (1-based) of an ``n_sites`` chain.

    Returns ``I x ... x local_op x ... x I`` as a sparse QuantumOperator.
    """
    n = _check_n_sites(n_sites)
    local_op = np.asarray(local_op, dtype=complex)
    if local_op.shape != (2, 2):
        raise ParameterError(f"local operator must be 2x2, got {local_op.shape}")
    if int(site) != site or not 1 <= site <= n:
        raise ParameterError(f"site {site} outside 1..{n}")
    left = sp.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sp.identity(2 ** (n - site), dtype=complex, format="csr")
    return QuantumOperator(n, sp.kron(sp.kron(left, sp.csr_matrix(local_op)), right, format="csr"))


def _validate_sites(sites, n_sites):
    sites = [int(s) for s in sites]
    if not sites:
        raise ParameterError("site list must be nonempty")
    if any(b <= a for a, b in zip(sites, sites[1:])):
        raise ParameterError(f"sites must be strictly increasing, got {sites}")
    if sites[0] < 1 or sites[-1] > n_sites:
        raise ParameterError(f"sites {sites} outside 1..{n_sites}")
    return sites


def partial_trace(rho, keep_sites):
    """Reduced density matrix on ``keep_sites`` (1-based, strictly increasing)."""
    if not isinstance(rho, DensityMatrix):
        raise ParameterError("partial_trace expects a DensityMatrix")
    n = rho.n_sites
    keep = _validate_sites(keep_sites, n)
    traced = [s for s in range(1, n + 1) if s not in keep]
    k, r = len(keep), len(traced)
    tensor = rho.data.reshape((2,) * (2 * n))
    axes = [s - 1 for s in keep] + [s - 1 for s in traced]
    axes += [n + a for a in axes]
    tensor = tensor.transpose(axes).reshape(2**k, 2**r, 2**k, 2**r)
    return DensityMatrix(k, np.einsum("ijkj->ik", tensor))


@dataclass(frozen=True)
class DensityDiagnostics:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float
    purity: float

    def ok(self, trace_tol=1e-6, herm_tol=1e-9, eig_tol=1e-8):
        return (
            abs(self.trace_error) <= trace_tol
            and self.hermiticity_error <= herm_tol
            and self.min_eigenvalue >= -eig_tol
        )


def check_density(rho, tol=1e-9):
    """Trace error, Hermiticity error, smallest eigenvalue and purity of ``rho``.

    ``tol`` is the Hermiticity threshold above which the eigenvalues are
    taken from the hermitized matrix rather than assumed real.
    """
    a = as_array(rho)
    herm = float(np.abs(a - a.conj().T).max()) if a.size else 0.0
    h = a if herm <= tol else 0.5 * (a + a.conj().T)
    min_eig = float(np.linalg.eigvalsh(h).min())
    return DensityDiagnostics(
        trace_error=float(abs(np.trace(a) - 1.0)),
        hermiticity_error=herm,
        min_eigenvalue=min_eig,
        purity=float(np.vdot(a, a).real),
    )


def hermitize(rho):
    """Return ``(rho + rho^dagger) / 2`` with the same type as the input."""
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(rho.n_sites, 0.5 * (rho.data + rho.data.conj().T))
    a = np.asarray(rho)
    return 0.5 * (a + a.conj().T)
