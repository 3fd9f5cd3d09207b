"""Pauli twirling of Kraus channels and conversion to master-equation rates."""
import csv
from dataclasses import dataclass

import numpy as np

from .channel import apply, pauli_channel, pauli_expansion
from .errors import CapacityError, DomainError, ValidationError
from .pauli import pauli_labels, pauli_matrices

MAX_BRUTEFORCE_QUBITS = 2
MAX_DIAGONAL_QUBITS = 3


@dataclass(frozen=True)
class PauliChannel:
    """Probabilities ``p_m`` of the Pauli channel ``sum_m p_m P_m rho P_m``."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (4**self.n,):
            raise ValidationError(f"expected {4**self.n} probabilities, got shape {probs.shape}")
        if probs.min() < -1e-12 or probs.max() > 1 + 1e-12:
            raise ValidationError("Pauli probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1) > 1e-10:
            raise ValidationError(f"Pauli probabilities sum to {probs.sum()}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def labels(self):
        return pauli_labels(self.n)

    def as_dict(self):
        return dict(zip(self.labels, self.probs.tolist()))

    def to_kraus(self):
        return pauli_channel(self.probs)


@dataclass(frozen=True)
class PtaRates:
    """Rates of ``rho_dot = sum_m gamma_m P_m rho P_m`` (``gamma_0`` multiplies ``rho``).

    Equivalently a Lindblad generator with jump operators ``P_m`` (m > 0)
    at rates ``gamma_m``; ``gamma_0 = -sum_{m>0} gamma_m``.
    """

    n: int
    gamma: np.ndarray

    def jumps(self):
        """``(operator, rate)`` pairs for the non-identity Paulis with nonzero rate."""
        paulis = pauli_matrices(self.n)
        return [(paulis[m], float(g)) for m, g in enumerate(self.gamma) if m and g > 0]

    def action(self, rho):
        paulis = pauli_matrices(self.n)
        return np.einsum("m,mab,bc,mcd->ad", self.gamma, paulis, rho, paulis)


def _twirled_action(ch, rho):
    paulis = pauli_matrices(ch.n)
    acc = np.zeros_like(rho)
    for p in paulis:
        acc += p @ apply(ch, p @ rho @ p) @ p
    return acc / len(paulis)


def pauli_coefficients_of_map(action, n):
    """Chi matrix of an arbitrary linear map given as a Python callable.

    Builds the Choi matrix ``J = sum_ab action(|a><b|) (x) |a><b|`` and reads
    ``c_ij = <<P_i| J |P_j>> / d^2`` with row-major vectorization.
    """
    d = 2**n
    choi = np.zeros((d * d, d * d), dtype=np.complex128)
    unit = np.zeros((d, d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            unit[a, b] = 1
            choi += np.kron(action(unit), unit)
            unit[a, b] = 0
    vecs = pauli_matrices(n).reshape(4**n, d * d)
    return vecs.conj() @ choi @ vecs.T / d**2


def twirl_bruteforce(ch):
    """Twirl by literally averaging the 4^n Pauli conjugations of ``ch``.

    The averaged map is expanded in the Pauli basis and its diagonal returned.
    Only intended for n <= 2; it is the reference for :func:`twirl_diagonal`.
    """
    if ch.n > MAX_BRUTEFORCE_QUBITS:
        raise CapacityError(f"brute-force twirl supports at most {MAX_BRUTEFORCE_QUBITS} qubits")
    c = pauli_coefficients_of_map(lambda rho: _twirled_action(ch, rho), ch.n)
    return PauliChannel(ch.n, _clean(np.real(np.diag(c))))


def twirl_diagonal(ch):
    """Twirl by reading the diagonal of the channel's chi matrix."""
    if ch.n > MAX_DIAGONAL_QUBITS:
        raise CapacityError(f"twirl supports at most {MAX_DIAGONAL_QUBITS} qubits")
    return PauliChannel(ch.n, _clean(pauli_expansion(ch).diagonal()))


def twirl(ch):
    return twirl_diagonal(ch)


def _clean(p):
    # tiny negative round-off on zero probabilities
    return np.where(np.abs(p) < 1e-15, 0.0, p)


def ad_twirl_probs(lam):
    """Closed-form twirl of amplitude damping: ``(p_I, p_X, p_Y, p_Z)``."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"damping probability must lie in [0, 1], got {lam}")
    s = np.sqrt(1 - lam)
    return np.array([(2 + 2 * s - lam) / 4, lam / 4, lam / 4, (2 - 2 * s - lam) / 4])


def pta_rates(pc, t_step):
    """First-order generator whose flow over ``t_step`` reproduces ``pc``.

    ``gamma_0 = (p_0 - 1) / t_step`` and ``gamma_m = p_m / t_step`` otherwise.
    Only meaningful close to the identity, hence ``p_0 > 0.5`` is required.
    """
    if t_step <= 0:
        raise DomainError(f"time step must be positive, got {t_step}")
    probs = np.asarray(pc.probs, dtype=float)
    if probs[0] <= 0.5:
        raise DomainError(f"identity probability {probs[0]} <= 0.5: too far from identity for a rate")
    gamma = probs / t_step
    gamma[0] = -(probs[1:].sum()) / t_step
    return PtaRates(pc.n, gamma)


def write_pauli_csv(pc, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["pauli_string", "probability"])
    for label, p in zip(pc.labels, pc.probs):
        writer.writerow([label, f"{p:.12g}"])
