"""Parameterized circuits: gate lists, the energy function, and its gradient.

A circuit is an ordered list of Pauli-rotation generators plus a reference
parameter vector θ₀.  Every evaluation is taken at θ₀ + θ, so optimizers can
work in a local frame around the current reference and move it with
``rebased`` between outer iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString
from .simulator import (
    StateVector,
    _apply_pauli,
    _apply_rotation,
    expectation,
    zero_state,
)


def _frozen_vector(values, length: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise ValueError(f"{what} must have shape ({length},), got {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AnsatzCircuit:
    """Ordered Pauli-rotation gates with a stored reference point θ₀.

    Gate k applies exp(-i(θ₀ₖ+θₖ)Pₖ/2); all generators share the qubit
    count and ν = len(generators) = len(theta_ref).  Instances are immutable;
    ``rebased`` returns a new circuit with a shifted reference.
    """

    num_qubits: int
    generators: tuple[PauliString, ...]
    theta_ref: np.ndarray = field(default=None)  # zeros when omitted

    def __post_init__(self):
        if not self.generators:
            raise ValueError("circuit needs at least one gate")
        generators = tuple(self.generators)
        for g in generators:
            if g.num_qubits != self.num_qubits:
                raise ValueError(
                    f"generator {g} acts on {g.num_qubits} qubits, "
                    f"circuit declares {self.num_qubits}"
                )
        object.__setattr__(self, "generators", generators)
        ref = self.theta_ref if self.theta_ref is not None else np.zeros(len(generators))
        object.__setattr__(
            self, "theta_ref", _frozen_vector(ref, len(generators), "theta_ref")
        )

    @property
    def num_parameters(self) -> int:
        return len(self.generators)

    def rebased(self, delta) -> "AnsatzCircuit":
        """New circuit with θ₀ ← θ₀ + delta (the local frame resets to 0)."""
        delta = _frozen_vector(delta, self.num_parameters, "delta")
        return AnsatzCircuit(self.num_qubits, self.generators, self.theta_ref + delta)


def build_hardware_efficient(N: int, blocks: int) -> AnsatzCircuit:
    """Layered ansatz with ν = N + 3·N·B parameters.

    One initial layer of single-qubit Y rotations, then B blocks of
    (i) N two-qubit ZZ rotations on ring pairs (i, i+1 mod N),
    (ii) N X rotations, (iii) N Y rotations.  theta_ref starts at zeros.
    """
    if N < 2:
        raise ValueError(f"hardware-efficient ansatz needs N >= 2 qubits, got {N}")
    if blocks < 1:
        raise ValueError(f"block count must be >= 1, got {blocks}")

    def single(letter: str, i: int) -> PauliString:
        chars = ["I"] * N
        chars[i] = letter
        return PauliString("".join(chars))

    def ring_zz(i: int) -> PauliString:
        chars = ["I"] * N
        chars[i] = "Z"
        chars[(i + 1) % N] = "Z"
        return PauliString("".join(chars))

    generators: list[PauliString] = [single("Y", i) for i in range(N)]
    for _ in range(blocks):
        generators.extend(ring_zz(i) for i in range(N))
        generators.extend(single("X", i) for i in range(N))
        generators.extend(single("Y", i) for i in range(N))
    return AnsatzCircuit(N, tuple(generators))


def _total_angles(circuit: AnsatzCircuit, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.num_parameters,):
        raise ValueError(
            f"expected {circuit.num_parameters} parameters, got shape {theta.shape}"
        )
    return circuit.theta_ref + theta


def prepare_state(circuit: AnsatzCircuit, theta) -> StateVector:
    """Apply the gates in index order at angles θ₀ + θ to the zero state."""
    angles = _total_angles(circuit, theta)
    amps = zero_state(circuit.num_qubits).amplitudes
    for generator, angle in zip(circuit.generators, angles):
        amps = _apply_rotation(amps, generator.letters, angle)
    return StateVector(circuit.num_qubits, amps)


def energy(circuit: AnsatzCircuit, theta, h) -> float:
    """E(θ) = ⟨ψ(θ₀+θ)|H|ψ(θ₀+θ)⟩."""
    return expectation(prepare_state(circuit, theta), h)


def energy_gradient(circuit: AnsatzCircuit, theta, h) -> np.ndarray:
    """Exact ∂E/∂θ by reverse (adjoint) differentiation, O(ν) gate work.

    Sweeps backward keeping ψₖ (state after gates 1..k) and λₖ = the final
    state propagated back through gates ν..k+1 after one application of H;
    the k-th component is 2·Re⟨λₖ|(-i/2)Pₖ|ψₖ⟩.  For Pauli-generated gates
    this equals the parameter-shift combination [E(+π/2)-E(-π/2)]/2 exactly.
    """
    angles = _total_angles(circuit, theta)
    nu = circuit.num_parameters
    psi = zero_state(circuit.num_qubits).amplitudes
    for generator, angle in zip(circuit.generators, angles):
        psi = _apply_rotation(psi, generator.letters, angle)
    lam = np.zeros_like(psi)
    for coeff, string in h.terms:
        lam += coeff * _apply_pauli(psi, string.letters)
    grad = np.empty(nu)
    for k in range(nu - 1, -1, -1):
        letters = circuit.generators[k].letters
        grad[k] = 2.0 * np.real(
            np.vdot(lam, -0.5j * _apply_pauli(psi, letters))
        )
        psi = _apply_rotation(psi, letters, -angles[k])
        lam = _apply_rotation(lam, letters, -angles[k])
    return grad


def parameter_shift_gradient(circuit: AnsatzCircuit, theta, h) -> np.ndarray:
    """Gradient from the two-query shift rule: gₖ = [E(θ+π/2vₖ) - E(θ-π/2vₖ)]/2.

    This is the literal device protocol (2ν energy queries); it agrees with
    ``energy_gradient`` to rounding and exists as the independent route.
    """
    theta = np.asarray(theta, dtype=float)
    nu = circuit.num_parameters
    grad = np.empty(nu)
    for k in range(nu):
        shift = np.zeros(nu)
        shift[k] = 0.5 * np.pi
        grad[k] = (energy(circuit, theta + shift, h) - energy(circuit, theta - shift, h)) / 2
    return grad


def circuit_to_text(circuit: AnsatzCircuit) -> str:
    """Serialize as one `<theta_ref> <generator letters>` line per gate.

    Mirrors the Pauli-sum text format, but line order is gate order and
    duplicate generators stay separate lines (each is its own parameter).
    """
    lines = [f"# qubits: {circuit.num_qubits}"]
    for angle, generator in zip(circuit.theta_ref, circuit.generators):
        lines.append(f"{angle:.17g} {generator.letters}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> AnsatzCircuit:
    """Inverse of ``circuit_to_text``; raises on malformed lines with line numbers."""
    generators: list[PauliString] = []
    angles: list[float] = []
    length: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(
                f"line {lineno}: expected '<angle> <letters>', got {line!r}"
            )
        try:
            angle = float(fields[0])
        except ValueError:
            raise ValueError(
                f"line {lineno}: malformed angle {fields[0]!r}"
            ) from None
        if length is None:
            length = len(fields[1])
        elif len(fields[1]) != length:
            raise ValueError(
                f"line {lineno}: generator length {len(fields[1])} differs "
                f"from previous length {length}"
            )
        try:
            generators.append(PauliString(fields[1]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        angles.append(angle)
    if not generators:
        raise ValueError("empty circuit description: no gate lines found")
    return AnsatzCircuit(length, tuple(generators), np.asarray(angles))
