"""Quantum Fisher information metric for natural-gradient preconditioning.

For a pure state |ψ(θ)⟩ the metric is F_mn = 2 tr[∂ₘρ ∂ₙρ] with
ρ = |ψ⟩⟨ψ|, which expands to 4 Re⟨∂ₘψ|∂ₙψ⟩ + 4 Re(⟨ψ|∂ₘψ⟩⟨ψ|∂ₙψ⟩).
`qfi_exact` evaluates this from the batched tangent sweep.  A two-term
overlap-based surrogate of the metric (leading b·b and a·b words only,
O(δ) accurate near θ₀) is provided alongside for study; the optimizer
defaults to the exact metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .ansatz import AnsatzCircuit, prepare_state
from .simulator import _state_and_tangents, overlap
from .surrogate import HALF_PI, MonomialBasis, TrustRegionError

_SYMMETRY_TOLERANCE = 1e-10
_PSD_TOLERANCE = -1e-8


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric PSD ν×ν metric; validated on construction."""

    nu: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (self.nu, self.nu):
            raise ValueError(
                f"expected {self.nu}x{self.nu} entries, got shape {entries.shape}"
            )
        if not np.all(np.isfinite(entries)):
            raise ValueError("non-finite metric entries")
        asym = float(np.max(np.abs(entries - entries.T))) if self.nu else 0.0
        if asym > _SYMMETRY_TOLERANCE:
            raise ValueError(f"metric asymmetry {asym:.3g} exceeds 1e-10")
        smallest = float(np.linalg.eigvalsh(entries)[0]) if self.nu else 0.0
        if smallest < _PSD_TOLERANCE:
            raise ValueError(
                f"metric is not positive semidefinite: smallest eigenvalue {smallest:.3g}"
            )
        entries = entries.copy()
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class MetricSurrogate:
    """Overlap-based coefficients of the two leading metric word classes.

    fBB[m,n] multiplies the b'·b' word, fAB[m,n] the a'·b' word with the
    a-derivative on axis m (so fAB is constant down each column).
    """

    theta0: np.ndarray
    fBB: np.ndarray
    fAB: np.ndarray

    def __post_init__(self):
        nu = len(self.theta0)
        for name in ("theta0", "fBB", "fAB"):
            arr = np.asarray(getattr(self, name), dtype=float)
            shape = (nu,) if name == "theta0" else (nu, nu)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def nu(self) -> int:
        return len(self.theta0)


def qfi_exact(circuit: AnsatzCircuit, theta) -> MetricTensor:
    """Fisher information matrix at θ₀+θ from one tangent-state sweep."""
    theta = np.asarray(theta, dtype=float)
    psi, tangents = _state_and_tangents(circuit, theta)
    gram = tangents.conj() @ tangents.T
    s = tangents.conj() @ psi  # s_m* = ⟨∂ₘψ|ψ⟩, so outer(s̄,s̄) pairs ⟨ψ|∂ψ⟩ factors
    s = np.conj(s)
    entries = 4.0 * np.real(gram) + 4.0 * np.real(np.outer(s, s))
    entries = 0.5 * (entries + entries.T)
    return MetricTensor(circuit.num_parameters, entries)


def qfi_surrogate_estimate(circuit: AnsatzCircuit, theta0) -> MetricSurrogate:
    """Leading metric coefficients from state overlaps at ±π/2 single shifts.

    fBB[m,n] combines the four overlaps of the (±m, ±n)-shifted states,
    fAB[·,n] the two overlaps of the unshifted state with the ±n-shifted
    ones.  All 2ν+1 states are prepared once.
    """
    theta0 = np.asarray(theta0, dtype=float)
    nu = circuit.num_parameters
    if theta0.shape != (nu,):
        raise ValueError(f"expected {nu} parameters, got shape {theta0.shape}")
    base = prepare_state(circuit, theta0)
    shifted = {}
    for m in range(nu):
        for sign in (1.0, -1.0):
            shift = theta0.copy()
            shift[m] += sign * HALF_PI
            shifted[(m, sign)] = prepare_state(circuit, shift)
    fBB = np.empty((nu, nu))
    for m in range(nu):
        for n in range(m, nu):
            value = (
                overlap(shifted[(m, 1.0)], shifted[(n, 1.0)])
                + overlap(shifted[(m, -1.0)], shifted[(n, -1.0)])
                - overlap(shifted[(m, -1.0)], shifted[(n, 1.0)])
                - overlap(shifted[(m, 1.0)], shifted[(n, -1.0)])
            )
            fBB[m, n] = value
            fBB[n, m] = value
    column = np.array(
        [
            overlap(base, shifted[(n, 1.0)]) - overlap(base, shifted[(n, -1.0)])
            for n in range(nu)
        ]
    )
    fAB = np.tile(column, (nu, 1))
    return MetricSurrogate(theta0, fBB, fAB)


def qfi_surrogate_eval(s: MetricSurrogate, theta) -> MetricTensor:
    """Two-word metric surrogate at θ (relative to θ₀); O(δ) accurate.

    Entry (m,n) sums fBB[m,n]·2·B'ₘB'ₙ and fAB[m,n]·2·A'ₘB'ₙ, where A'ₘ
    and B'ₘ are the θₘ-derivatives of the all-a product and the single-b
    monomial; the result is symmetrized.  At θ=0 this is fBB/2 exactly.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (s.nu,):
        raise ValueError(f"expected {s.nu} parameters, got shape {theta.shape}")
    if s.nu and np.max(np.abs(theta)) >= HALF_PI:
        raise TrustRegionError(
            f"‖θ‖∞ = {np.max(np.abs(theta)):.6g} is outside the |θₖ| < π/2 "
            "region where the metric surrogate is declared"
        )
    basis = MonomialBasis.from_theta(theta)
    loo = basis.leave_one_out()
    dB = basis.db * loo
    dA = basis.da * loo
    raw = 2.0 * s.fBB * np.outer(dB, dB) + 2.0 * s.fAB * np.outer(dA, dB)
    entries = 0.5 * (raw + raw.T)
    return MetricTensor(s.nu, entries)


def regularized_natural_direction(F: MetricTensor, eta: float, g) -> np.ndarray:
    """Solve (F + ηI)·d = g with a symmetric positive-definite factorization."""
    if eta < 0.0:
        raise ValueError(f"regularization must be >= 0, got {eta}")
    g = np.asarray(g, dtype=float)
    if g.shape != (F.nu,):
        raise ValueError(f"expected gradient of length {F.nu}, got shape {g.shape}")
    shifted = F.entries + eta * np.eye(F.nu)
    try:
        factor = cho_factor(shifted, lower=True, check_finite=False)
    except LinAlgError as exc:
        smallest = float(np.linalg.eigvalsh(shifted)[0])
        raise LinAlgError(
            f"regularized metric is not positive definite "
            f"(smallest eigenvalue {smallest:.6g}, eta={eta})"
        ) from exc
    return cho_solve(factor, g, check_finite=False)
