"""Pauli strings and the two operator bases used for generator extraction.

Strings are indexed base-4 with ``I=0, X=1, Y=2, Z=3`` and the leftmost
letter most significant, so ``"XZ"`` has index ``1*4 + 3 = 7``.  The same
order fixes the layout of every 4^n-sized vector and matrix in the package.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import CapacityError, DomainError
from .numerics import kron

LETTERS = "IXYZ"
MAX_QUBITS = 5

SIGMA = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
# |0><1| lowers the excited state |1> to the ground state |0>.
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_PLUS = SIGMA_MINUS.T.copy()


@dataclass(frozen=True)
class PauliString:
    """An n-qubit tensor product label such as ``"XIZ"``."""

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise DomainError("a Pauli string needs at least one letter")
        bad = set(self.letters) - set(LETTERS)
        if bad:
            raise DomainError(f"invalid Pauli letters {sorted(bad)} in {self.letters!r}")

    @property
    def n(self):
        return len(self.letters)

    @property
    def index(self):
        idx = 0
        for ch in self.letters:
            idx = 4 * idx + LETTERS.index(ch)
        return idx

    @classmethod
    def from_index(cls, index, n):
        if not 0 <= index < 4**n:
            raise DomainError(f"index {index} out of range for {n} qubits")
        letters = []
        for _ in range(n):
            index, r = divmod(index, 4)
            letters.append(LETTERS[r])
        return cls("".join(reversed(letters)))

    def matrix(self):
        return pauli_matrix(self)

    def __str__(self):
        return self.letters


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")


def pauli_labels(n):
    """All 4^n Pauli strings of length ``n`` in index order."""
    return ["".join(p) for p in product(LETTERS, repeat=n)]


def pauli_matrix(p):
    """Unnormalized 2^n x 2^n matrix of a Pauli string (or its text form)."""
    letters = p.letters if isinstance(p, PauliString) else PauliString(str(p)).letters
    return kron(*(SIGMA[ch] for ch in letters))


@lru_cache(maxsize=None)
def _pauli_stack(n):
    stack = np.array([pauli_matrix(lab) for lab in pauli_labels(n)])
    stack.setflags(write=False)
    return stack


def pauli_matrices(n):
    """Array of shape ``(4^n, 2^n, 2^n)`` holding every Pauli matrix in index order."""
    _check_n(n)
    return _pauli_stack(n)


def hermitian_basis(n):
    """Orthonormal Hermitian operator basis ``G_a = P_a / sqrt(2^n)``.

    Returns an array of shape ``(4^n, 2^n, 2^n)`` with ``tr(G_a G_b) = delta_ab``.
    """
    _check_n(n)
    return _pauli_stack(n) / np.sqrt(2**n)


def tau_basis(n):
    """Outer-product basis ``tau_e = |e1><e2|`` with ``e = e1 * 2^n + e2``.

    For one qubit the order is ``|0><0|, |0><1|, |1><0|, |1><1|``.
    """
    _check_n(n)
    d = 2**n
    return np.eye(d * d, dtype=np.complex128).reshape(d * d, d, d)


def anticommute(p, q):
    """True when two Pauli strings anticommute as operators."""
    a, b = str(p), str(q)
    if len(a) != len(b):
        raise DomainError("Pauli strings must have equal length")
    clashes = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return clashes % 2 == 1


def commutation_signs(n):
    """Matrix ``s[m, k] = +1`` if Paulis m and k commute, ``-1`` otherwise."""
    _check_n(n)
    labels = pauli_labels(n)
    return np.array([[-1.0 if anticommute(a, b) else 1.0 for b in labels] for a in labels])


def embed(op, qubit, n):
    """Place a single-qubit operator on ``qubit`` (0 = leftmost) of an n-qubit register."""
    if not 0 <= qubit < n:
        raise DomainError(f"qubit {qubit} out of range for {n} qubits")
    eye = np.eye(2, dtype=np.complex128)
    return kron(*(op if q == qubit else eye for q in range(n)))
