"""Statevector engine: gates, expectations, overlaps, ground energies,
tangent vectors.  Every nontrivial value is cross-checked against the dense
matrix oracles in conftest."""

import numpy as np
import pytest

from analytic_descent import (
    AnsatzCircuit,
    PauliString,
    PauliSum,
    StateVector,
    apply_pauli_rotation,
    apply_pauli_string,
    expectation,
    ground_energy,
    hamiltonian_matrix,
    overlap,
    parse_pauli_sum,
    prepare_state,
    spin_ring_hamiltonian,
    tangent_states,
    zero_state,
)
from conftest import (
    dense_hamiltonian,
    pauli_matrix,
    random_circuit,
    random_hamiltonian,
    random_string,
)
from scipy.linalg import expm


def test_zero_state_amplitudes():
    assert np.array_equal(zero_state(1).amplitudes, [1.0, 0.0])
    assert np.array_equal(zero_state(2).amplitudes, [1.0, 0.0, 0.0, 0.0])
    assert abs(np.linalg.norm(zero_state(12).amplitudes) - 1.0) < 1e-15


def test_state_vector_rejects_unnormalized():
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 1.0], dtype=complex))


def test_rotation_identity_at_zero_angle():
    psi = zero_state(2)
    out = apply_pauli_rotation(psi, PauliString("XY"), 0.0)
    assert np.array_equal(out.amplitudes, psi.amplitudes)


def test_rotation_x_pi_on_zero():
    out = apply_pauli_rotation(zero_state(1), PauliString("X"), np.pi)
    assert np.allclose(out.amplitudes, [0.0, -1.0j], atol=1e-15)


def test_rotation_two_pi_is_minus_identity():
    rng = np.random.default_rng(5)
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    amps /= np.linalg.norm(amps)
    psi = StateVector(3, amps)
    out = apply_pauli_rotation(psi, PauliString("ZZZ"), 2.0 * np.pi)
    assert np.allclose(out.amplitudes, -amps, atol=1e-12)


def test_rotation_matches_matrix_exponential():
    """Gate kernel vs expm(-i theta P / 2) on random states, N <= 4."""
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        amps /= np.linalg.norm(amps)
        string = random_string(rng, n, identity_ok=True)
        theta = float(rng.uniform(-2.0 * np.pi, 2.0 * np.pi))
        got = apply_pauli_rotation(StateVector(n, amps), string, theta).amplitudes
        want = expm(-0.5j * theta * pauli_matrix(string.letters)) @ amps
        assert np.max(np.abs(got - want)) < 1e-10


def test_rotation_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_pauli_rotation(zero_state(2), PauliString("X"), 0.3)


def test_apply_pauli_string_matches_matrix():
    rng = np.random.default_rng(23)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        amps /= np.linalg.norm(amps)
        string = random_string(rng, n, identity_ok=True)
        got = apply_pauli_string(StateVector(n, amps), string).amplitudes
        assert np.max(np.abs(got - pauli_matrix(string.letters) @ amps)) < 1e-12


def test_norm_preserved_under_long_sequences():
    rng = np.random.default_rng(31)
    psi = zero_state(10)
    for _ in range(200):
        psi = apply_pauli_rotation(
            psi, random_string(rng, 10), float(rng.uniform(-np.pi, np.pi))
        )
    assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-9


def test_expectation_zero_state_z():
    assert expectation(zero_state(1), parse_pauli_sum("1 Z")) == 1.0


def test_expectation_rx_slice_is_cosine():
    h = parse_pauli_sum("1 Z")
    for theta in np.linspace(-np.pi, np.pi, 9):
        psi = apply_pauli_rotation(zero_state(1), PauliString("X"), theta)
        assert abs(expectation(psi, h) - np.cos(theta)) < 1e-12


def test_expectation_identity_term_is_constant():
    rng = np.random.default_rng(3)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    amps /= np.linalg.norm(amps)
    h = PauliSum(2, ((0.75, PauliString("II")),))
    assert abs(expectation(StateVector(2, amps), h) - 0.75) < 1e-12


def test_expectation_matches_dense_quadratic_form():
    rng = np.random.default_rng(41)
    for _ in range(15):
        n = int(rng.integers(1, 5))
        amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        amps /= np.linalg.norm(amps)
        h = random_hamiltonian(rng, n, 6)
        want = float(np.real(amps.conj() @ dense_hamiltonian(h) @ amps))
        assert abs(expectation(StateVector(n, amps), h) - want) < 1e-10


def test_overlap_properties():
    psi = zero_state(1)
    flipped = apply_pauli_rotation(psi, PauliString("X"), np.pi)
    assert abs(overlap(psi, psi) - 1.0) < 1e-14
    assert overlap(psi, flipped) < 1e-14
    for theta in (0.3, 1.1, 2.5):
        rotated = apply_pauli_rotation(psi, PauliString("X"), theta)
        want = np.cos(theta / 2.0) ** 2
        assert abs(overlap(psi, rotated) - want) < 1e-12
        assert abs(overlap(rotated, psi) - want) < 1e-12


def test_overlap_is_phase_invariant():
    rng = np.random.default_rng(7)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    amps /= np.linalg.norm(amps)
    psi = StateVector(2, amps)
    phased = StateVector(2, np.exp(0.7j) * amps)
    assert abs(overlap(psi, phased) - 1.0) < 1e-12


def test_hamiltonian_matrix_matches_dense():
    rng = np.random.default_rng(53)
    h = random_hamiltonian(rng, 3, 8)
    assert np.max(np.abs(hamiltonian_matrix(h) - dense_hamiltonian(h))) < 1e-14


def test_ground_energy_single_qubit():
    assert abs(ground_energy(parse_pauli_sum("1 Z")) + 1.0) < 1e-10
    assert abs(ground_energy(parse_pauli_sum("1 X")) + 1.0) < 1e-10


def test_ground_energy_heisenberg_triangle():
    # S=1/2 ground sector of the 3-site ring at J=0.05
    assert abs(ground_energy(spin_ring_hamiltonian(3, 0.05)) + 0.15) < 1e-8


def test_ground_energy_two_site_ring():
    # doubled bond at N=2: coefficients 2J, singlet at -6J
    assert abs(ground_energy(spin_ring_hamiltonian(2, 0.05)) + 0.3) < 1e-10


def test_ground_energy_matches_dense_diagonalization():
    """Iterative path vs numpy.linalg.eigvalsh for N up to 6."""
    rng = np.random.default_rng(61)
    for n in (2, 3, 4, 5, 6):
        h = random_hamiltonian(rng, n, 3 * n)
        want = float(np.linalg.eigvalsh(dense_hamiltonian(h)).min())
        assert abs(ground_energy(h) - want) < 1e-8


def test_tangent_single_rx_at_zero():
    circuit = AnsatzCircuit(1, (PauliString("X"),))
    (tangent,) = tangent_states(circuit, np.zeros(1))
    assert np.allclose(tangent.amplitudes, [0.0, -0.5j], atol=1e-15)


def test_tangent_norm_bound():
    rng = np.random.default_rng(71)
    circuit = random_circuit(rng, 3, 8)
    for tangent in tangent_states(circuit, rng.uniform(-1.0, 1.0, 8)):
        assert np.linalg.norm(tangent.amplitudes) <= 0.5 + 1e-12


def test_tangent_matches_central_differences():
    """ || (psi(+eps) - psi(-eps)) / 2eps - tangent ||  =  O(eps^2) """
    rng = np.random.default_rng(83)
    circuit = random_circuit(rng, 3, 6)
    theta = rng.uniform(-0.5, 0.5, 6)
    tangents = tangent_states(circuit, theta)
    eps = 1e-4
    for m in range(6):
        shift = np.zeros(6)
        shift[m] = eps
        diff = (
            prepare_state(circuit, theta + shift).amplitudes
            - prepare_state(circuit, theta - shift).amplitudes
        ) / (2.0 * eps)
        assert np.max(np.abs(diff - tangents[m].amplitudes)) < 1e-7
