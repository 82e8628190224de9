import numpy as np
import pytest

from xxchain.dynamics import IntegratorConfig
from xxchain.errors import ParameterError
from xxchain.experiments.oracles import (
    KINDS, chain_liouvillian, dense_liouvillian, liouvillian_check, oracle_check,
)
from xxchain.model import ChainSpec, total_hamiltonian


def test_chain_liouvillian_independent_hamiltonian():
    spec = ChainSpec(4, J_prime=0.05)
    L = chain_liouvillian(spec)
    H = total_hamiltonian(spec).toarray()
    rho = np.random.default_rng(1).normal(size=(16, 16))
    expected = -1j * (H @ rho - rho @ H)
    assert np.allclose((L @ rho.reshape(-1)).reshape(16, 16), expected)


def test_dense_liouvillian_single_decay():
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    L = dense_liouvillian(np.zeros((2, 2)), [(0.5, sm)])
    excited = np.diag([0, 1]).astype(complex).reshape(-1)
    assert np.allclose((L @ excited).reshape(2, 2), 0.5 * np.diag([1, -1]))


def test_liouvillian_oracle_rk4():
    report = liouvillian_check()
    assert report.passed and report.max_deviation <= 1e-6


def test_liouvillian_oracle_split():
    report = liouvillian_check(IntegratorConfig("strang_split", dt=0.02))
    assert report.passed


@pytest.mark.parametrize("n_bar", [0.05, 0.1])
def test_single_qubit_oracle(n_bar):
    report = oracle_check("single_qubit_steady", n_bar=n_bar)
    assert report.passed
    assert report.details["p1_final"] == pytest.approx(n_bar / (2 * n_bar + 1), abs=1e-6)


def test_effective_model_oracle():
    report = oracle_check("effective_model", n_sites=8)
    assert report.passed and report.max_deviation <= 0.1
    assert "PASS effective_model" in report.line()


def test_unknown_kind():
    assert set(KINDS) == {"liouvillian_n4", "single_qubit_steady", "effective_model"}
    with pytest.raises(ParameterError):
        oracle_check("bogus")
