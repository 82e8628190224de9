"""Wootters concurrence of two-qubit states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalValidityError, ParameterError
from .quantum_core import SIGMA_Y, DensityMatrix, partial_trace

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)
CLIP = 1e-10
# State eigenvalues below this are rounding noise. The lambdas go like the
# square root of such eigenvalues, so keeping them would cost ~1e-8 accuracy.
ZERO_EIG = 1e-13


@dataclass(frozen=True)
class ConcurrenceResult:
    value: float
    lambdas: tuple  # square roots of the spin-flip eigenvalues, descending

    def recompute(self):
        lam = np.asarray(self.lambdas)
        return max(0.0, 2 * lam[0] - lam.sum())


def concurrence_from_array(rho):
    """Concurrence of a 4x4 array; the hot path used inside long runs.

    The lambdas are the square roots of the eigenvalues of
    ``rho (sy x sy) rho* (sy x sy)``. With ``rho = W W^+`` they equal the
    singular values of ``W^T (sy x sy) W``, which avoids square roots of
    rounding-level eigenvalues and keeps pure states accurate to ~1e-15.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ParameterError(f"concurrence needs a 4x4 matrix, got {rho.shape}")
    rho = 0.5 * (rho + rho.conj().T)
    w, V = np.linalg.eigh(rho)
    if w.min() < -CLIP:
        raise NumericalValidityError(f"state has negative eigenvalue {w.min():.3e}")
    w = np.where(w < ZERO_EIG, 0.0, w)
    W = V * np.sqrt(w)
    lam = np.linalg.svd(W.T @ SPIN_FLIP @ W, compute_uv=False)
    value = min(1.0, max(0.0, 2 * lam[0] - lam.sum()))
    return ConcurrenceResult(float(value), tuple(float(x) for x in lam))


def concurrence(rho2):
    """Wootters concurrence of a two-qubit DensityMatrix.

    Raises
    ------
    ParameterError
        If the state is not a Hermitian, unit-trace 4x4 matrix.
    NumericalValidityError
        If the state has an eigenvalue below ``-1e-10``.
    """
    data = rho2.data if isinstance(rho2, DensityMatrix) else np.asarray(rho2)
    if data.shape != (4, 4):
        raise ParameterError(f"concurrence needs a two-qubit state, got shape {data.shape}")
    if abs(np.trace(data) - 1.0) > 1e-6:
        raise ParameterError(f"state trace {np.trace(data)} is not 1")
    if np.abs(data - data.conj().T).max() > 1e-8:
        raise ParameterError("state is not Hermitian")
    return concurrence_from_array(data)


def end_to_end_concurrence(rho_full):
    """Concurrence between the first and last site of a chain state."""
    return concurrence(partial_trace(rho_full, [1, rho_full.n_sites]))
