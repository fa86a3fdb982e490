"""Exact statevector simulation: the stand-in for the quantum device.

States live on N qubits as dense complex amplitude vectors of length 2^N,
indexed so that qubit 0 is the most significant bit (matching the leftmost
letter of a Pauli string).  Every gate is a Pauli rotation

    exp(-i θ P / 2) ψ = cos(θ/2) ψ - i sin(θ/2) P ψ,

and a Pauli string acts as a signed permutation of the computational basis:
P|i⟩ = i^{n_Y} (-1)^{popcount(i & m_{YZ})} |i ^ m_{XY}⟩, where m_{XY} flips
the X/Y bits and m_{YZ} collects the sign-carrying Y/Z bits.  That kernel is
cached per letter string and reused by gates, expectations, and the
Hamiltonian matvec behind the iterative ground-energy solver.

All operations are pure functions over immutable values, so independent
energy queries may run concurrently without shared state.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse.linalg

from .pauli import PauliString, PauliSum

if TYPE_CHECKING:  # import only for annotations; ansatz imports us at runtime
    from .ansatz import AnsatzCircuit

# Largest supported register; 2^20 amplitudes is still a small dense vector.
MAX_QUBITS = 20

# Dense diagonalization below this dimension; ARPACK above.
_DENSE_DIM = 8

_NORM_TOLERANCE = 1e-10


class GroundEnergyError(RuntimeError):
    """Iterative eigensolver failed to converge."""


@dataclass(frozen=True)
class StateVector:
    """Immutable 2^num_qubits complex amplitude vector.

    The L2 norm must be 1 within 1e-10 on construction.  ``check_norm=False``
    is reserved for derivative (tangent) vectors, which are not quantum
    states and have norm ≤ 1/2.
    """

    num_qubits: int
    amplitudes: np.ndarray
    check_norm: InitVar[bool] = True

    def __post_init__(self, check_norm: bool):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for "
                f"{self.num_qubits} qubits, got shape {amps.shape}"
            )
        if check_norm:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > _NORM_TOLERANCE:
                raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-10")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@lru_cache(maxsize=4096)
def _pauli_kernel(letters: str):
    """Signed-permutation form of a Pauli string: (source index, phase)."""
    n = len(letters)
    flip = 0
    sign_mask = 0
    n_y = 0
    for k, letter in enumerate(letters):
        bit = 1 << (n - 1 - k)
        if letter in "XY":
            flip |= bit
        if letter in "YZ":
            sign_mask |= bit
        if letter == "Y":
            n_y += 1
    idx = np.arange(2**n, dtype=np.int64)
    src = idx ^ flip
    parity = (np.bitwise_count(src & sign_mask) & 1).astype(np.int64)
    phase = (1j**n_y) * np.where(parity, -1.0, 1.0)
    phase = np.asarray(phase, dtype=np.complex128)
    phase.flags.writeable = False
    src.flags.writeable = False
    return src, phase


def _apply_pauli(amps: np.ndarray, letters: str) -> np.ndarray:
    """P·amps for 1-D amplitudes or batches with amplitudes on the last axis."""
    src, phase = _pauli_kernel(letters)
    return amps[..., src] * phase


def _apply_rotation(amps: np.ndarray, letters: str, theta: float) -> np.ndarray:
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    return c * amps + (-1j * s) * _apply_pauli(amps, letters)


def zero_state(N: int) -> StateVector:
    """Computational zero state |0...0⟩ on N qubits."""
    if not 1 <= N <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {N}")
    amps = np.zeros(2**N, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(N, amps)


def apply_pauli_string(psi: StateVector, P: PauliString) -> StateVector:
    """P|ψ⟩; applying the same string twice returns |ψ⟩ (P² = I)."""
    if P.num_qubits != psi.num_qubits:
        raise ValueError(
            f"Pauli string on {P.num_qubits} qubits cannot act on "
            f"{psi.num_qubits}-qubit state"
        )
    return StateVector(psi.num_qubits, _apply_pauli(psi.amplitudes, P.letters))


def apply_pauli_rotation(psi: StateVector, P: PauliString, theta: float) -> StateVector:
    """Apply exp(-i θ P / 2) = cos(θ/2)·Id - i sin(θ/2)·P to the state."""
    if P.num_qubits != psi.num_qubits:
        raise ValueError(
            f"Pauli string on {P.num_qubits} qubits cannot act on "
            f"{psi.num_qubits}-qubit state"
        )
    amps = _apply_rotation(psi.amplitudes, P.letters, theta)
    return StateVector(psi.num_qubits, amps)


def expectation(psi: StateVector, h: PauliSum) -> float:
    """⟨ψ|H|ψ⟩ = Σ c_j ⟨ψ|P_j|ψ⟩ for a real-weighted Pauli sum.

    The imaginary residue must vanish (|Im| < 1e-10) since H is Hermitian;
    a larger residue indicates a corrupted state or sum and raises.
    """
    if h.num_qubits != psi.num_qubits:
        raise ValueError(
            f"operator on {h.num_qubits} qubits does not match "
            f"{psi.num_qubits}-qubit state"
        )
    amps = psi.amplitudes
    total = 0.0 + 0.0j
    for coeff, string in h.terms:
        total += coeff * np.vdot(amps, _apply_pauli(amps, string.letters))
    if abs(total.imag) >= 1e-10:
        raise ValueError(f"expectation has imaginary residue {total.imag}")
    return float(total.real)


def overlap(psi: StateVector, phi: StateVector) -> float:
    """|⟨ψ|φ⟩|², symmetric and insensitive to global phase, clipped to [0, 1]."""
    if psi.num_qubits != phi.num_qubits:
        raise ValueError(
            f"cannot overlap states on {psi.num_qubits} and {phi.num_qubits} qubits"
        )
    value = abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2
    return float(min(max(value, 0.0), 1.0))


def hamiltonian_matrix(h: PauliSum, max_qubits: int = 10) -> np.ndarray:
    """Dense Hermitian matrix of a Pauli sum (small systems only).

    Each term is a signed permutation, so column i of the matrix carries the
    phase of P|i⟩ at row i ^ flip; the dense form is assembled column-wise
    without any Kronecker products.
    """
    if h.num_qubits > max_qubits:
        raise ValueError(
            f"dense matrix limited to {max_qubits} qubits, got {h.num_qubits}"
        )
    dim = 2**h.num_qubits
    idx = np.arange(dim)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, string in h.terms:
        src, phase = _pauli_kernel(string.letters)
        # Column i of P has its only entry at row i ^ flip = src[i]; the gather
        # kernel stores phase[j] = phase of P|src[j]⟩, so that entry is phase[src[i]].
        matrix[src, idx] += coeff * phase[src]
    return matrix


def ground_energy(h: PauliSum) -> float:
    """Minimum eigenvalue of a Pauli sum, absolute accuracy ≤ 1e-8.

    Small systems are diagonalized densely; above dimension 8 an iterative
    extremal eigensolver (Lanczos) runs on the matrix-free H·v product built
    from the same Pauli kernels the gate engine uses.
    """
    if h.num_qubits > MAX_QUBITS:
        raise ValueError(f"qubit count {h.num_qubits} exceeds cap {MAX_QUBITS}")
    if h.num_terms == 0:
        return 0.0
    dim = 2**h.num_qubits
    if dim <= _DENSE_DIM:
        return float(np.linalg.eigvalsh(hamiltonian_matrix(h)).min())

    terms = [(coeff, string.letters) for coeff, string in h.terms]

    def matvec(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.complex128).reshape(dim)
        out = np.zeros(dim, dtype=np.complex128)
        for coeff, letters in terms:
            out += coeff * _apply_pauli(v, letters)
        return out

    operator = scipy.sparse.linalg.LinearOperator(
        (dim, dim), matvec=matvec, dtype=np.complex128
    )
    # Fixed starting vector keeps the solve deterministic across runs.
    v0 = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    try:
        values = scipy.sparse.linalg.eigsh(
            operator,
            k=1,
            which="SA",
            tol=1e-10,
            maxiter=10_000,
            v0=v0,
            return_eigenvectors=False,
        )
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        residual = "unavailable"
        if len(exc.eigenvalues) and exc.eigenvectors is not None:
            vec = exc.eigenvectors[:, 0]
            residual = float(
                np.linalg.norm(matvec(vec) - exc.eigenvalues[0] * vec)
            )
        raise GroundEnergyError(
            f"extremal eigensolver did not converge in 10000 iterations "
            f"(residual: {residual})"
        ) from exc
    return float(values[0])


def _state_and_tangents(circuit: AnsatzCircuit, theta: np.ndarray):
    """Final state and all ν analytic tangents ∂|ψ⟩/∂θ_m in one sweep.

    Gate m contributes tangent U_ν...U_{m+1}·(-i/2)P_m·U_m...U_1|0⟩.  The
    sweep keeps every started tangent in a (m, 2^N) block and pushes each
    subsequent gate through the whole block at once, so the work is O(ν²·2^N)
    flops in O(ν) vectorized operations.
    """
    angles = np.asarray(circuit.theta_ref, dtype=float) + np.asarray(theta, dtype=float)
    if angles.shape != (circuit.num_parameters,):
        raise ValueError(
            f"expected {circuit.num_parameters} parameters, got shape {angles.shape}"
        )
    dim = 2**circuit.num_qubits
    nu = circuit.num_parameters
    # Row 0 carries |ψ⟩, rows 1..k the tangents started so far; pushing each
    # gate through the whole block at once keeps the sweep at O(ν) batched
    # numpy calls.  P(c·ψ − i·s·Pψ) = c·Pψ − i·s·ψ (P² = I) gives the new
    # tangent without a second Pauli application.
    block = np.zeros((nu + 1, dim), dtype=np.complex128)
    block[0, 0] = 1.0
    for k, generator in enumerate(circuit.generators):
        src, phase = _pauli_kernel(generator.letters)
        c = np.cos(0.5 * angles[k])
        s = np.sin(0.5 * angles[k])
        live = block[: k + 1]
        psi_old = block[0].copy()
        pauli_applied = live[:, src] * phase
        live *= c
        live += (-1j * s) * pauli_applied
        block[k + 1] = -0.5j * (c * pauli_applied[0] + (-1j * s) * psi_old)
    return block[0], block[1:]


def tangent_states(circuit: AnsatzCircuit, theta) -> list[StateVector]:
    """Analytic derivative vectors ∂|ψ(θ)⟩/∂θ_m for every parameter.

    The returned vectors are tangents, not normalized quantum states: their
    norm is at most 1/2 (generator eigenvalues ±1 with the 1/2 gate factor),
    hence the relaxed construction.
    """
    _, tangents = _state_and_tangents(circuit, np.asarray(theta, dtype=float))
    return [
        StateVector(circuit.num_qubits, row, check_norm=False) for row in tangents
    ]
