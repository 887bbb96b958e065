"""Sparse Pauli-word operators and the dense linear-algebra kernel.

Hermitian operators on n qubits are stored as real-weighted sums of Pauli
words (dicts qubit index -> X/Y/Z letter, identity elsewhere).  Dense
2^n x 2^n numpy arrays are the numerical carrier for everything downstream:
conjugation, matrix exponentials, norms, and the inverse transform back to
Pauli coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DENSE_QUBIT_LIMIT = 12
COEFF_DROP_TOL = 1e-14

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_AXES = ("I", "X", "Y", "Z")
# conj(P_s[r, c]) stacked over s = I, X, Y, Z; used by pauli_coefficients
_BASIS_CONJ = np.stack([PAULI_1Q[s].conj() for s in _AXES])


class DimensionLimitError(ValueError):
    """Dense construction requested beyond the configured qubit limit."""


class NonUnitaryError(ValueError):
    """A matrix that must be unitary fails the tolerance check."""


class NonHermitianError(ValueError):
    """A matrix that must be Hermitian fails the tolerance check."""


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of single-qubit Paulis; absent indices are identity."""

    letters: tuple[tuple[int, str], ...]
    n_qubits: int

    def __init__(self, letters, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        items = tuple(sorted(dict(letters).items()))
        for q, s in items:
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit index {q} outside 0..{n_qubits - 1}")
            if s not in ("X", "Y", "Z"):
                raise ValueError(f"invalid Pauli letter {s!r}")
        object.__setattr__(self, "letters", items)
        object.__setattr__(self, "n_qubits", n_qubits)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def weight(self) -> int:
        return len(self.letters)

    def label(self) -> str:
        if not self.letters:
            return "I"
        return "".join(f"{s}{q}" for q, s in self.letters)

    def to_matrix(self) -> np.ndarray:
        letters = dict(self.letters)
        out = np.array([[1.0 + 0j]])
        for q in range(self.n_qubits):
            out = np.kron(out, PAULI_1Q[letters.get(q, "I")])
        return out


@dataclass(frozen=True)
class OperatorSum:
    """Hermitian operator as a normalized real combination of Pauli words."""

    terms: tuple[tuple[float, PauliWord], ...]
    n_qubits: int

    def __init__(self, terms, n_qubits: int | None = None):
        terms = list(terms)
        if n_qubits is None:
            if not terms:
                raise ValueError("n_qubits required for an empty sum")
            n_qubits = terms[0][1].n_qubits
        merged: dict[PauliWord, float] = {}
        for coeff, word in terms:
            if word.n_qubits != n_qubits:
                raise ValueError("all words must share n_qubits")
            merged[word] = merged.get(word, 0.0) + float(coeff)
        kept = tuple(
            (c, w) for w, c in sorted(merged.items(), key=lambda it: it[0].letters)
            if abs(c) >= COEFF_DROP_TOL
        )
        object.__setattr__(self, "terms", kept)
        object.__setattr__(self, "n_qubits", int(n_qubits))

    @classmethod
    def zero(cls, n_qubits: int) -> "OperatorSum":
        return cls([], n_qubits=n_qubits)

    @classmethod
    def from_label_terms(cls, terms, n_qubits: int) -> "OperatorSum":
        """Build from (coeff, {qubit: letter}) pairs."""
        return cls(
            [(c, PauliWord(w, n_qubits)) for c, w in terms], n_qubits=n_qubits
        )

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, word: PauliWord) -> float:
        for c, w in self.terms:
            if w == word:
                return c
        return 0.0

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return OperatorSum(self.terms + other.terms, n_qubits=self.n_qubits)

    def __rmul__(self, scalar: float) -> "OperatorSum":
        return OperatorSum(
            [(scalar * c, w) for c, w in self.terms], n_qubits=self.n_qubits
        )

    def __neg__(self) -> "OperatorSum":
        return (-1.0) * self

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-other)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "terms": [
                {"coeff": c, "word": {str(q): s for q, s in w.letters}}
                for c, w in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorSum":
        n = int(data["n_qubits"])
        terms = [
            (float(t["coeff"]), PauliWord({int(q): s for q, s in t["word"].items()}, n))
            for t in data["terms"]
        ]
        return cls(terms, n_qubits=n)


def num_qubits(a: np.ndarray) -> int:
    """Qubit count of a square dense operator; rejects non-2^n dimensions."""
    dim = a.shape[0]
    if a.ndim != 2 or a.shape[1] != dim:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def to_dense(op: OperatorSum, dense_limit: int = DENSE_QUBIT_LIMIT) -> np.ndarray:
    """Materialize an OperatorSum as a 2^n x 2^n complex matrix."""
    if op.n_qubits > dense_limit:
        raise DimensionLimitError(
            f"{op.n_qubits} qubits exceeds the dense limit of {dense_limit}"
        )
    dim = 2**op.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, word in op.terms:
        out += coeff * word.to_matrix()
    return out


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(
        np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), "fro") <= tol
    )


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.linalg.norm(a - a.conj().T, "fro") <= tol)


def conjugate(a: np.ndarray, u: np.ndarray, unitary_tol: float = 1e-10) -> np.ndarray:
    """Frame change u^dag a u; u must be unitary within tolerance."""
    if a.shape != u.shape:
        raise ValueError("dimension mismatch")
    if not is_unitary(u, unitary_tol):
        raise NonUnitaryError("conjugating matrix is not unitary within tolerance")
    return u.conj().T @ a @ u


def pauli_coefficient_tensor(a: np.ndarray) -> np.ndarray:
    """Complex coefficients tr(P_w^dag a) / 2^n as a (4,)*n tensor.

    The transform is applied one qubit at a time on the reshaped tensor, so
    cost is O(n 4^n) rather than one trace per word.  Axis order per qubit is
    I, X, Y, Z.
    """
    n = num_qubits(a)
    t = a.reshape((2,) * (2 * n))
    # interleave row/col axes per qubit: (r1, c1, r2, c2, ...)
    perm = [ax for pair in zip(range(n), range(n, 2 * n)) for ax in pair]
    t = np.transpose(t, perm)
    for _ in range(n):
        t = np.einsum("src,rc...->...s", _BASIS_CONJ, t)
    return t / 2**n


def pauli_coefficients(
    a: np.ndarray, hermitian_tol: float = 1e-10, drop_tol: float = COEFF_DROP_TOL
) -> OperatorSum:
    """Expand a Hermitian dense matrix in the orthonormal Pauli-word basis."""
    n = num_qubits(a)
    if not is_hermitian(a, hermitian_tol):
        raise NonHermitianError("input is not Hermitian within tolerance")
    coeffs = pauli_coefficient_tensor(a)
    terms = []
    for idx in np.argwhere(np.abs(coeffs) >= drop_tol):
        letters = {q: _AXES[s] for q, s in enumerate(idx) if s != 0}
        terms.append((coeffs[tuple(idx)].real, PauliWord(letters, n)))
    return OperatorSum(terms, n_qubits=n)


def single_pauli_word_of(u: np.ndarray, tol: float = 1e-8) -> PauliWord | None:
    """The Pauli word equal to u up to a global phase, or None."""
    n = num_qubits(u)
    coeffs = pauli_coefficient_tensor(u)
    mags = np.abs(coeffs)
    flat = int(np.argmax(mags))
    idx = np.unravel_index(flat, mags.shape)
    if abs(mags[idx] - 1.0) > tol:
        return None
    rest = mags.copy()
    rest[idx] = 0.0
    if rest.max() > tol:
        return None
    letters = {q: _AXES[s] for q, s in enumerate(idx) if s != 0}
    return PauliWord(letters, n)


def matrix_exp(a: np.ndarray, t: float) -> np.ndarray:
    """exp(-i a t) for Hermitian a, via eigendecomposition."""
    if t == 0.0:
        return np.eye(a.shape[0], dtype=complex)
    evals, evecs = np.linalg.eigh(a)
    return (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def operator_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class _AxisPropagator:
    """Cached eigendecomposition of a Hermitian axis; calls give exp(-i theta axis)."""

    evals: np.ndarray = field(repr=False)
    evecs: np.ndarray = field(repr=False)

    def __call__(self, theta: float) -> np.ndarray:
        return (self.evecs * np.exp(-1j * theta * self.evals)) @ self.evecs.conj().T


def axis_propagator(axis: np.ndarray) -> _AxisPropagator:
    evals, evecs = np.linalg.eigh(axis)
    return _AxisPropagator(evals, evecs)
