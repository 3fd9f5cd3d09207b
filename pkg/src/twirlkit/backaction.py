"""No-jump evolution versus the iterated Pauli-twirled map.

The exact side evolves an all-excited register under the non-Hermitian
Hamiltonian ``H = -sum_q Z_q - (i gamma / 2) sum_q |1><1|_q`` and reports the
surviving norm.  The twirled side composes the single-step Pauli channel of
amplitude damping with itself and reports the weight of the terms that leave
``|1><1|`` in place (identity and Z).
"""
import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels, numerics
from .channel import basis_state, lambda_of_time
from .errors import DomainError, ValidationError
from .pauli import SIGMA, SIGMA_MINUS, SIGMA_PLUS, embed
from .twirl import ad_twirl_probs

THRESHOLD_RULES = ("px", "pxy")


@dataclass(frozen=True)
class EffectiveHamiltonian:
    n: int
    gamma: float
    h_free: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        anti = -0.5j * (self.matrix - numerics.dag(self.matrix))
        if np.linalg.eigvalsh((anti + numerics.dag(anti)) / 2).max() > numerics.settings.atol:
            raise ValidationError("effective Hamiltonian would increase the norm")

    def propagator(self, t):
        return numerics.mat_exp(-1j * self.matrix * t)


def effective_hamiltonian(n_qubits, t1):
    """``H_free - (i / 2T1) sum_q sigma+ sigma-`` with ``H_free = -sum_q Z_q``."""
    if t1 <= 0:
        raise DomainError(f"T1 must be positive, got {t1}")
    gamma = 1.0 / t1
    excited = SIGMA_PLUS @ SIGMA_MINUS
    h_free = -sum(embed(SIGMA["Z"], q, n_qubits) for q in range(n_qubits))
    decay = sum(embed(excited, q, n_qubits) for q in range(n_qubits))
    return EffectiveHamiltonian(n_qubits, gamma, h_free, h_free - 0.5j * gamma * decay)


@dataclass(frozen=True)
class PtaMapState:
    """Per-qubit Pauli weights ``(p_I, p_X, p_Y, p_Z)`` after ``step_index`` steps.

    ``single_step`` is the one-step distribution the map keeps composing with.
    """

    probs: tuple
    single_step: tuple
    step_index: int = 1

    def __post_init__(self):
        for name in ("probs", "single_step"):
            p = tuple(float(x) for x in getattr(self, name))
            if len(p) != 4 or min(p) < -1e-12 or abs(sum(p) - 1) > 1e-12:
                raise ValidationError(f"{name} must be 4 probabilities summing to 1, got {p}")
            object.__setattr__(self, name, p)

    @property
    def no_excitation(self):
        return self.probs[0] + self.probs[3]


def no_excitation_exact(n_qubits, t1, t, method="expm"):
    """Norm left after no-jump evolution of ``|1...1>`` for time ``t``.

    ``method="expm"`` evolves with the matrix exponential; ``"eigen"`` uses
    the closed form ``exp(-n t / T1)``.
    """
    if t1 <= 0:
        raise DomainError(f"T1 must be positive, got {t1}")
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if n_qubits < 1:
        raise DomainError(f"need at least one qubit, got {n_qubits}")
    if method == "eigen":
        return float(np.exp(-n_qubits * t / t1))
    if method != "expm":
        raise ValueError(f"unknown method {method!r}")
    heff = effective_hamiltonian(n_qubits, t1)
    u = heff.propagator(t)
    rho0 = basis_state("1" * n_qubits)
    return float(np.trace(u @ rho0 @ numerics.dag(u)).real)


def no_excitation_time_ordered(n_qubits, gamma_of_t, t, steps=1000):
    """No-jump norm for a time-dependent decay rate, by a midpoint product of propagators.

    For families whose damping is not exponential the effective decay rate
    varies with time and the propagator needs time ordering.
    """
    if t < 0 or steps < 1:
        raise DomainError("need t >= 0 and at least one step")
    excited = SIGMA_PLUS @ SIGMA_MINUS
    h_free = -sum(embed(SIGMA["Z"], q, n_qubits) for q in range(n_qubits))
    decay = sum(embed(excited, q, n_qubits) for q in range(n_qubits))
    dt = t / steps
    u = np.eye(2**n_qubits, dtype=np.complex128)
    for k in range(steps):
        h = h_free - 0.5j * gamma_of_t((k + 0.5) * dt) * decay
        u = numerics.mat_exp(-1j * h * dt) @ u
    rho0 = basis_state("1" * n_qubits)
    return float(np.trace(u @ rho0 @ numerics.dag(u)).real)


def pta_step_probs(t1, t_step):
    """Single-step twirled amplitude-damping weights for a step ``t_step``."""
    if t_step <= 0:
        raise DomainError(f"time step must be positive, got {t_step}")
    p = ad_twirl_probs(lambda_of_time(t_step, t1))
    return PtaMapState(tuple(p), tuple(p), 1)


def iterate_pta(state):
    """Compose the map once more with its single-step distribution."""
    nxt = kernels.pta_orbit(state.single_step, state.probs, 1)[1]
    return PtaMapState(tuple(nxt), state.single_step, state.step_index + 1)


def pta_orbit(t1, t_step, steps):
    """Array of shape ``(steps + 1, 4)``; row ``k`` holds the weights after ``k`` steps.

    Row 0 is the identity channel ``(1, 0, 0, 0)``.
    """
    p1 = pta_step_probs(t1, t_step).single_step
    return kernels.pta_orbit(p1, (1.0, 0.0, 0.0, 0.0), steps)


def iterate_to_fixed_point(single_step, tol=1e-10, max_iter=100_000):
    """Iterate from ``single_step`` until successive weights differ by less than ``tol``.

    Returns the orbit with row ``k`` holding the weights after ``k`` extra
    compositions; the last row is the converged state.
    """
    return kernels.pta_fixed_point(single_step, single_step, tol, max_iter)


def no_excitation_pta(t1, t_step, steps, n_qubits=1):
    """Probability the twirled map leaves ``|1...1>`` excited after ``steps`` steps."""
    if steps < 0:
        raise DomainError(f"steps must be nonnegative, got {steps}")
    row = pta_orbit(t1, t_step, steps)[-1]
    return float((row[0] + row[3]) ** n_qubits)


def bit_flip_threshold(t1, t_step, rule="px"):
    """Per-step bit-flip probability: ``p_X`` (``"px"``) or ``p_X + p_Y`` (``"pxy"``)."""
    if rule not in THRESHOLD_RULES:
        raise ValueError(f"threshold rule must be one of {THRESHOLD_RULES}, got {rule!r}")
    lam = lambda_of_time(t_step, t1)
    return lam / 4 if rule == "px" else lam / 2


@dataclass
class BackactionScan:
    n_qubits: int
    t1: float
    t_step: float
    threshold: float
    times: np.ndarray
    p_exact: np.ndarray
    p_pta: np.ndarray
    gap: np.ndarray = field(init=False)
    crossed: np.ndarray = field(init=False)

    def __post_init__(self):
        self.gap = np.abs(self.p_exact - self.p_pta)
        self.crossed = self.gap > self.threshold

    @property
    def divergence_time(self):
        hits = np.flatnonzero(self.crossed)
        return float(self.times[hits[0]]) if hits.size else None


def backaction_scan(n_qubits, t1, t_step, horizon, rule="px", method="expm"):
    """Exact and twirled no-excitation probabilities on the grid ``k * t_step <= horizon``."""
    if horizon <= t_step:
        raise DomainError(f"horizon {horizon} must exceed the step {t_step}")
    steps = int(np.floor(horizon / t_step + 1e-9))
    times = t_step * np.arange(steps + 1)
    if method == "expm":
        # one propagator per step, reused; the no-jump norm factorizes per step
        u1 = effective_hamiltonian(n_qubits, t1).propagator(t_step)
        psi = np.zeros(2**n_qubits, dtype=np.complex128)
        psi[-1] = 1
        p_exact = np.empty(steps + 1)
        for k in range(steps + 1):
            p_exact[k] = np.vdot(psi, psi).real
            psi = u1 @ psi
    else:
        p_exact = np.array([no_excitation_exact(n_qubits, t1, t, method) for t in times])
    orbit = pta_orbit(t1, t_step, steps)
    p_pta = (orbit[:, 0] + orbit[:, 3]) ** n_qubits
    return BackactionScan(n_qubits, t1, t_step, bit_flip_threshold(t1, t_step, rule), times, p_exact, p_pta)


def divergence_time(n_qubits, t1, t_step, horizon, rule="px"):
    """First grid time where the exact and twirled probabilities differ by more than the bit-flip threshold.

    Returns ``None`` if that never happens up to ``horizon``.
    """
    return backaction_scan(n_qubits, t1, t_step, horizon, rule).divergence_time


def write_backaction_csv(scans, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n_qubits", "t", "p_exact", "p_pta", "gap", "threshold", "crossed"])
    for s in scans:
        for t, pe, pp, g, c in zip(s.times, s.p_exact, s.p_pta, s.gap, s.crossed):
            writer.writerow([s.n_qubits, f"{t:.12g}", f"{pe:.12g}", f"{pp:.12g}", f"{g:.12g}", f"{s.threshold:.12g}", int(c)])
    fh.write("\n")
    writer.writerow(["n_qubits", "divergence_time"])
    for s in scans:
        dt = s.divergence_time
        writer.writerow([s.n_qubits, "none" if dt is None else f"{dt:.12g}"])
