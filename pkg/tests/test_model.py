import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from xxchain.entanglement import concurrence
from xxchain.errors import ParameterError, UnsupportedError
from xxchain.model import (
    ChainSpec, DephasingRange, build_channel_hamiltonian, build_interaction_hamiltonian,
    effective_coupling, effective_model_concurrence, effective_period, excitation_number,
    hubbard_to_xx, initial_ket, initial_state, total_hamiltonian,
)
from xxchain.quantum_core import DensityMatrix, basis_ket, partial_trace


def idx(bits):
    return int(bits, 2)


def test_spec_validation():
    for bad in (dict(n_sites=3), dict(n_sites=15), dict(J=0), dict(J_prime=2.0),
                dict(gamma=-1), dict(n_bar=-0.1), dict(gamma=0.1, noise_kind="none"),
                dict(noise_kind="heat")):
        with pytest.raises((ParameterError, ValueError)):
            ChainSpec(**bad)


def test_spec_roundtrip():
    spec = ChainSpec(6, J_prime=0.1, gamma=0.02, n_bar=0.1, noise_kind="dissipation")
    assert ChainSpec.from_dict(spec.to_dict()) == spec
    assert spec.replace(n_sites=8).n_sites == 8


def test_jump_site_ranges():
    spec = ChainSpec(10, gamma=0.02, noise_kind="dephasing")
    assert spec.jump_sites == list(range(2, 10))
    literal = spec.replace(dephasing_sites=DephasingRange.PAPER_LITERAL)
    assert literal.jump_sites == list(range(2, 9))


def test_channel_hopping_element_n4():
    H = build_channel_hamiltonian(ChainSpec(4, J=1.0)).toarray()
    assert H[idx("0010"), idx("0100")] == 1.0


def test_channel_single_excitation_spectrum():
    H = build_channel_hamiltonian(ChainSpec(4)).toarray()
    block = H[np.ix_([idx("0100"), idx("0010")], [idx("0100"), idx("0010")])]
    assert np.allclose(np.linalg.eigvalsh(block), [-1, 1])


def test_interaction_element_and_zero():
    H = build_interaction_hamiltonian(ChainSpec(4, J_prime=0.05)).toarray()
    assert H[idx("0100"), idx("1000")] == 0.05
    assert np.array_equal(H, H.conj().T)
    assert build_interaction_hamiltonian(ChainSpec(4, J_prime=0.0)).norm() == 0


def test_total_bonds_n4():
    H = total_hamiltonian(ChainSpec(4, J=1.0, J_prime=0.05)).toarray()
    bonds = {}
    for a in range(4):
        for b in range(a + 1, 4):
            ket = ["0"] * 4
            bra = ["0"] * 4
            ket[a] = "1"
            bra[b] = "1"
            value = H[idx("".join(bra)), idx("".join(ket))]
            if value:
                bonds[(a + 1, b + 1)] = value
    assert bonds == {(1, 2): 0.05, (2, 3): 1.0, (3, 4): 0.05}


def test_uniform_chain_when_couplings_match():
    H = total_hamiltonian(ChainSpec(6, J=1.0, J_prime=1.0)).toarray()
    one_ex = [1 << (5 - k) for k in range(6)]
    block = H[np.ix_(one_ex, one_ex)]
    assert np.allclose(block, np.diag(np.ones(5), 1) + np.diag(np.ones(5), -1))


@given(n=st.integers(4, 6), jp=st.floats(0, 1), J=st.floats(0.5, 2))
def test_hamiltonians_hermitian_and_conserving(n, jp, J):
    spec = ChainSpec(n, J=max(J, jp), J_prime=jp)
    N_op = excitation_number(n)
    for H in (build_channel_hamiltonian(spec), build_interaction_hamiltonian(spec),
              total_hamiltonian(spec)):
        assert (H - H.dag()).norm() < 1e-15
        assert H.commutator(N_op).norm() < 1e-12


def test_initial_state_n4():
    psi = initial_ket(ChainSpec(4))
    support = {idx(b) for b in ("0000", "0001", "1000", "1001")}
    for i, amp in enumerate(psi):
        assert amp == pytest.approx(0.5 if i in support else 0.0)


def test_initial_state_marginals():
    rho = initial_state(ChainSpec(6))
    assert np.allclose(partial_trace(rho, [1, 6]).data, 0.25)
    channel = partial_trace(rho, [2, 3, 4, 5]).data
    assert channel[0, 0] == pytest.approx(1) and np.isclose(np.abs(channel).sum(), 1)


def test_effective_coupling_values():
    assert effective_coupling(ChainSpec(10, J_prime=0.05)) == pytest.approx(-0.0025)
    assert effective_coupling(ChainSpec(4, J_prime=0.05)) == pytest.approx(0.0025)
    assert effective_coupling(ChainSpec(6, J_prime=0.0)) == 0
    with pytest.raises(UnsupportedError):
        effective_coupling(ChainSpec(9))
    assert effective_period(-0.0025) == pytest.approx(np.pi / 0.0025)


def effective_state(J_e, t):
    """|++> evolved under J_e (s+ s- + h.c.) by direct exponentiation."""
    H = np.zeros((4, 4))
    H[1, 2] = H[2, 1] = J_e
    plus = np.array([1, 1]) / np.sqrt(2)
    return sla.expm(-1j * H * t) @ np.kron(plus, plus)


@pytest.mark.parametrize("J_e", [0.0025, -0.0025, 0.3])
@pytest.mark.parametrize("frac", [0.0, 0.13, 0.5, 0.77, 1.0])
def test_effective_concurrence_matches_exponentiation(J_e, frac):
    t = frac * np.pi / abs(J_e)
    psi = effective_state(J_e, t)
    # Pure-state formula as a second route beside the Wootters routine.
    pure = 2 * abs(psi[0] * psi[3] - psi[1] * psi[2])
    wootters = concurrence(DensityMatrix.from_ket(psi)).value
    closed = effective_model_concurrence(t, J_e)
    assert closed == pytest.approx(pure, abs=1e-9)
    assert closed == pytest.approx(wootters, abs=1e-9)


def test_effective_concurrence_examples():
    assert effective_model_concurrence(0.0, 0.0025) == 0
    assert effective_model_concurrence(np.pi / (2 * 0.0025), 0.0025) == pytest.approx(1.0)
    assert effective_model_concurrence(628.318, -0.0025) == pytest.approx(1.0, abs=1e-9)


def test_hubbard_symmetric_point_is_exactly_xx():
    assert hubbard_to_xx(1.0, 1.0, 2.0, 2.0, 1.0).J_z == 0.0


@given(j=st.floats(1e-3, 10), U=st.floats(1e-2, 100))
def test_hubbard_symmetric_point_property(j, U):
    assert hubbard_to_xx(j, j, 2 * U, 2 * U, U).J_z == 0.0


def test_hubbard_examples():
    assert tuple(hubbard_to_xx(0.0, 0.0, 1.0, 1.0, 1.0)) == (0.0, 0.0)
    c = hubbard_to_xx(1.0, 0.0, 1.0, 1.0, 1.0)
    assert c.J_z == -0.5 and c.J_perp == 1.0
    with pytest.raises(ParameterError):
        hubbard_to_xx(1.0, 1.0, 0.0, 1.0, 1.0)


def test_bell_state_embedded_in_chain():
    bell_ends = (basis_ket("000000") + basis_ket("100001")) / np.sqrt(2)
    rho = DensityMatrix.from_ket(bell_ends)
    assert concurrence(partial_trace(rho, [1, 6])).value == pytest.approx(1.0, abs=1e-9)
