"""Pauli strings, real-weighted Pauli sums, and Hamiltonian generators.

A Pauli string is a dense tensor product of single-qubit operators from
{I, X, Y, Z}, written as a letter sequence with qubit 0 leftmost.  A Pauli
sum is a real linear combination of Pauli strings on a common qubit count;
real coefficients keep the operator Hermitian by construction.

The text format is one term per line, ``<coefficient> <letters>``, with
``#``-prefixed comment lines.  A ``# qubits: N`` header is always emitted so
that sums with no terms still round-trip.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_VALID_LETTERS = frozenset("IXYZ")

# Terms with |coefficient| below this are dropped when a sum is canonicalized.
MERGE_TOLERANCE = 1e-15


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. ``"XIZ"`` for X⊗I⊗Z.

    Parameters
    ----------
    letters : str
        One character per qubit from {I, X, Y, Z}; qubit 0 is leftmost.
    """

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise ValueError("Pauli string must have at least one qubit")
        bad = set(self.letters) - _VALID_LETTERS
        if bad:
            raise ValueError(
                f"invalid Pauli letters {sorted(bad)} in {self.letters!r}; "
                "allowed letters are I, X, Y, Z"
            )

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def __str__(self) -> str:
        return self.letters


@dataclass(frozen=True)
class PauliSum:
    """Real linear combination of Pauli strings on a common qubit count.

    Terms are canonicalized on construction: sorted lexicographically by
    letter string, duplicates merged by summing coefficients, and merged
    coefficients with magnitude below ``MERGE_TOLERANCE`` dropped.  The
    result is immutable; all coefficients must be finite reals so the
    operator is Hermitian by construction.
    """

    num_qubits: int
    terms: tuple[tuple[float, PauliString], ...] = field(default=())

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be positive, got {self.num_qubits}")
        merged: dict[str, float] = {}
        for coeff, string in self.terms:
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff} for {string}")
            if string.num_qubits != self.num_qubits:
                raise ValueError(
                    f"term {string} acts on {string.num_qubits} qubits, "
                    f"sum declares {self.num_qubits}"
                )
            merged[string.letters] = merged.get(string.letters, 0.0) + coeff
        canonical = tuple(
            (c, PauliString(s))
            for s, c in sorted(merged.items())
            if abs(c) >= MERGE_TOLERANCE
        )
        object.__setattr__(self, "terms", canonical)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def parse_pauli_sum(text: str) -> PauliSum:
    """Parse the line-oriented Pauli-sum format into a merged PauliSum.

    Each non-empty, non-comment line must be ``<real> <letters>`` with all
    letter strings of equal length.  The qubit count is inferred from the
    letters, or from a ``# qubits: N`` header when the body has no terms.

    Raises
    ------
    ValueError
        On a malformed coefficient, inconsistent string lengths, bad
        letters, or empty input, naming the offending line.
    """
    terms: list[tuple[float, PauliString]] = []
    header_qubits: int | None = None
    length: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("qubits:"):
                value = body.split(":", 1)[1].strip()
                try:
                    header_qubits = int(value)
                except ValueError:
                    raise ValueError(
                        f"line {lineno}: malformed qubit header {line!r}"
                    ) from None
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(
                f"line {lineno}: expected '<coefficient> <letters>', got {line!r}"
            )
        coeff_text, letters = fields
        try:
            coeff = float(coeff_text)
        except ValueError:
            raise ValueError(
                f"line {lineno}: malformed coefficient {coeff_text!r}"
            ) from None
        if length is None:
            length = len(letters)
        elif len(letters) != length:
            raise ValueError(
                f"line {lineno}: Pauli string {letters!r} has length "
                f"{len(letters)}, previous terms have length {length}"
            )
        try:
            string = PauliString(letters)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        terms.append((coeff, string))

    if length is None:
        if header_qubits is None:
            raise ValueError("empty input: no terms and no '# qubits: N' header")
        return PauliSum(header_qubits, ())
    if header_qubits is not None and header_qubits != length:
        raise ValueError(
            f"header declares {header_qubits} qubits but terms have length {length}"
        )
    return PauliSum(length, tuple(terms))


def format_pauli_sum(h: PauliSum) -> str:
    """Emit the text form of ``h``; ``parse_pauli_sum`` inverts it exactly.

    Coefficients are printed with enough digits (%.17g) to round-trip
    float64 values bit for bit.
    """
    lines = [f"# qubits: {h.num_qubits}"]
    for coeff, string in h.terms:
        lines.append(f"{coeff:.17g} {string.letters}")
    return "\n".join(lines) + "\n"


def spin_ring_hamiltonian(N: int, J: float, omega=None) -> PauliSum:
    """Periodic Heisenberg ring with longitudinal fields.

    Builds sum_i J·(X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + sum_i ω_i Z_i
    with site N+1 identified with site 1.  For N=2 the two bonds coincide, so
    the coupling terms merge to coefficient 2J each.

    Parameters
    ----------
    N : int
        Number of ring sites (qubits), N ≥ 2.
    J : float
        Uniform exchange coupling.
    omega : array_like of N reals, optional
        Longitudinal field per site; zero entries emit no term.  None means
        all-zero fields.
    """
    if N < 2:
        raise ValueError(f"spin ring needs N >= 2 sites, got {N}")
    omega = np.zeros(N) if omega is None else np.asarray(omega, dtype=float)
    if omega.shape != (N,):
        raise ValueError(f"omega must have length {N}, got shape {omega.shape}")

    def two_site(letter: str, i: int, j: int) -> PauliString:
        chars = ["I"] * N
        chars[i] = letter
        chars[j] = letter
        return PauliString("".join(chars))

    terms: list[tuple[float, PauliString]] = []
    for i in range(N):
        j = (i + 1) % N
        for letter in "XYZ":
            terms.append((J, two_site(letter, i, j)))
    for i in range(N):
        if omega[i] != 0.0:
            chars = ["I"] * N
            chars[i] = "Z"
            terms.append((float(omega[i]), PauliString("".join(chars))))
    return PauliSum(N, tuple(terms))
