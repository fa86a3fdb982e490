"""Shared helpers: independent dense-matrix oracles and random generators.

The oracles here deliberately avoid the package's own gate kernels: states
and operators are built from explicit 2x2 matrices, Kronecker products, and
scipy's matrix exponential, so cross-checks run through genuinely different
arithmetic than the code under test.
"""

import numpy as np
from scipy.linalg import expm

from analytic_descent import AnsatzCircuit, PauliString, PauliSum

SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def pauli_matrix(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli string, qubit 0 leftmost in the Kron order."""
    out = np.array([[1.0 + 0.0j]])
    for letter in letters:
        out = np.kron(out, SINGLE_QUBIT[letter])
    return out


def dense_hamiltonian(h: PauliSum) -> np.ndarray:
    dim = 2**h.num_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, string in h.terms:
        out += coeff * pauli_matrix(string.letters)
    return out


def dense_prepared_state(circuit: AnsatzCircuit, theta) -> np.ndarray:
    """Reference state preparation through scipy.linalg.expm, gate by gate."""
    psi = np.zeros(2**circuit.num_qubits, dtype=complex)
    psi[0] = 1.0
    total = np.asarray(circuit.theta_ref) + np.asarray(theta, dtype=float)
    for angle, generator in zip(total, circuit.generators):
        psi = expm(-0.5j * angle * pauli_matrix(generator.letters)) @ psi
    return psi


def dense_energy(circuit: AnsatzCircuit, theta, h: PauliSum) -> float:
    psi = dense_prepared_state(circuit, theta)
    return float(np.real(psi.conj() @ dense_hamiltonian(h) @ psi))


def fd_metric(circuit: AnsatzCircuit, theta, eps: float = 1e-4) -> np.ndarray:
    """Independent metric route: 2 tr[dr_m dr_n] from centered density-matrix
    differences built on the dense matrix-exponential state preparation."""
    nu = circuit.num_parameters

    def rho(t):
        psi = dense_prepared_state(circuit, t)
        return np.outer(psi, psi.conj())

    theta = np.asarray(theta, dtype=float)
    drho = []
    for m in range(nu):
        e = np.zeros(nu)
        e[m] = eps
        drho.append((rho(theta + e) - rho(theta - e)) / (2.0 * eps))
    out = np.empty((nu, nu))
    for m in range(nu):
        for n in range(nu):
            out[m, n] = 2.0 * np.real(np.trace(drho[m] @ drho[n]))
    return out


_LETTERS = np.array(list("IXYZ"))


def random_string(rng, n: int, identity_ok: bool = False) -> PauliString:
    while True:
        letters = "".join(rng.choice(_LETTERS, size=n))
        if identity_ok or set(letters) != {"I"}:
            return PauliString(letters)


def random_hamiltonian(rng, n: int, num_terms: int) -> PauliSum:
    terms = tuple(
        (float(rng.uniform(-1.0, 1.0)), random_string(rng, n))
        for _ in range(num_terms)
    )
    return PauliSum(n, terms)


def random_circuit(rng, n: int, nu: int, spread: float = np.pi) -> AnsatzCircuit:
    generators = tuple(random_string(rng, n) for _ in range(nu))
    theta_ref = rng.uniform(-spread, spread, nu)
    return AnsatzCircuit(n, generators, theta_ref)
