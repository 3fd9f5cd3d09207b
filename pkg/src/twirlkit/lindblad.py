"""Recover a time-local master equation from a family of channels.

For a family ``phi_t`` with transfer matrices ``F(t)`` the generator matrix
in the Hermitian basis is ``L = F_dot F^{-1}``.  The same generator written
over the outer-product basis gives the matrix ``R`` with

    rho_dot = sum_ef R_ef tau_e rho tau_f^dagger,

which is diagonalized into a Hamiltonian and Lindblad jump operators.
"""
import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import numerics
from .channel import KrausChannel, amplitude_damping, identity_channel, lambda_of_time, transfer_matrix, unitary_channel
from .errors import DomainError, NonMarkovianError, SingularityError
from .numerics import dag
from .pauli import SIGMA_MINUS, SIGMA_PLUS, hermitian_basis

DEFAULT_STEP = 1e-4
RATE_TOL = 1e-6


@dataclass(frozen=True)
class ChannelFamily:
    """A one-parameter family of channels ``t -> phi_t`` with ``phi_0 = id``.

    ``derivative`` optionally returns the exact ``F_dot(t)``; it is used when
    no finite-difference step is requested.  ``time_scale`` sets the default
    finite-difference step ``DEFAULT_STEP * time_scale``.
    """

    n: int
    at: Callable[[float], KrausChannel]
    label: str = ""
    derivative: Optional[Callable[[float], np.ndarray]] = None
    time_scale: float = 1.0


@dataclass
class GeneratorSnapshot:
    t: float
    L: np.ndarray
    R: np.ndarray
    hamiltonian: np.ndarray
    jumps: list = field(default_factory=list)

    @property
    def rates(self):
        return [rate for _, rate in self.jumps]

    def action(self, rho):
        return lindblad_action(self.hamiltonian, self.jumps, rho)


# -- families ----------------------------------------------------------------


def amplitude_damping_family(t1):
    """Amplitude damping with ``lambda(t) = 1 - exp(-t / T1)``."""
    if t1 <= 0:
        raise DomainError(f"T1 must be positive, got {t1}")

    def at(t):
        return amplitude_damping(lambda_of_time(t, t1))

    def derivative(t):
        # F = [[1,0,0,0],[0,f,0,0],[0,0,f,0],[lam,0,0,1-lam]], f = exp(-t/2T1)
        e = np.exp(-t / t1)
        fd = np.zeros((4, 4))
        fd[1, 1] = fd[2, 2] = -np.exp(-t / (2 * t1)) / (2 * t1)
        fd[3, 0] = e / t1
        fd[3, 3] = -e / t1
        return fd

    return ChannelFamily(1, at, f"amplitude_damping(T1={t1:g})", derivative, t1)


def unitary_family(h):
    """Closed evolution ``rho -> e^{-iHt} rho e^{iHt}``."""
    h = numerics.as_matrix(h)
    n = int(round(np.log2(h.shape[0])))
    comm = generator_matrix(lambda x: -1j * (h @ x - x @ h), n)
    scale = 1.0 / max(np.abs(np.linalg.eigvalsh(h)).max(), 1e-300)

    def at(t):
        return unitary_channel(numerics.mat_exp(-1j * h * t))

    def derivative(t):
        return comm @ transfer_matrix(at(t))

    return ChannelFamily(n, at, "unitary", derivative, min(scale, 1.0))


def identity_family(n=1):
    ch = identity_channel(n)
    return ChannelFamily(n, lambda t: ch, "identity", lambda t: np.zeros((4**n, 4**n)))


# -- generator extraction ---------------------------------------------------


def f_matrix(fam, t):
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    return transfer_matrix(fam.at(t))


def f_dot(fam, t, h=None):
    """Time derivative of ``F`` at ``t``.

    With an explicit step ``h`` a central difference is used, or the
    second-order one-sided stencil when ``t < h``.  With ``h=None`` the
    family's exact derivative is used if it has one, otherwise a central
    difference with the default step.
    """
    if h is None:
        if fam.derivative is not None:
            return np.asarray(fam.derivative(t), dtype=float)
        h = DEFAULT_STEP * fam.time_scale
    if h <= 0:
        raise DomainError(f"finite-difference step must be positive, got {h}")
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if t >= h:
        return (f_matrix(fam, t + h) - f_matrix(fam, t - h)) / (2 * h)
    return (-3 * f_matrix(fam, t) + 4 * f_matrix(fam, t + h) - f_matrix(fam, t + 2 * h)) / (2 * h)


def generator_L(fam, t, h=None):
    """``L = F_dot F^{-1}``, the generator matrix in the Hermitian basis.

    Raises:
        SingularityError: when ``F(t)`` is too ill-conditioned to invert.
    """
    f = f_matrix(fam, t)
    fd = f_dot(fam, t, h)
    # L F = F_dot  <=>  F^T L^T = F_dot^T
    return numerics.solve_linear(f.T, fd.T).T.real


def choi_from_generator(L, n):
    """Matrix ``R`` over ``tau``-basis pairs for the generator with Hermitian-basis matrix ``L``.

    ``R_ef = <e1| Lambda(|e2><f2|) |f1> = sum_kl L_kl tr(tau_e^dag G_k tau_f G_l)``.
    """
    g = hermitian_basis(n)
    d = 2**n
    r = np.einsum("kl,kac,ldb->abcd", L, g, g)
    return r.reshape(d * d, d * d)


def choi_R(fam, t, h=None):
    return choi_from_generator(generator_L(fam, t, h), fam.n)


def choi_action(R, rho):
    """``sum_ef R_ef tau_e rho tau_f^dagger``."""
    d = rho.shape[0]
    r = R.reshape(d, d, d, d)
    # tau_e rho tau_f^dag = |e1><e2| rho |f2><f1|
    return np.einsum("abcd,bd->ac", r, rho)


def generator_matrix(action, n):
    """``L_kl = tr(G_k action(G_l))`` for a linear map given as a callable."""
    g = hermitian_basis(n)
    return np.array([[np.trace(gk @ action(gl)).real for gl in g] for gk in g])


def lindblad_action(hamiltonian, jumps, rho):
    """``-i[H, rho] + sum_k rate_k (J rho J^dag - {J^dag J, rho} / 2)``."""
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for j, rate in jumps:
        jdj = dag(j) @ j
        out = out + rate * (j @ rho @ dag(j) - 0.5 * (jdj @ rho + rho @ jdj))
    return out


def lindblad_superoperator(hamiltonian, jumps):
    """Row-major superoperator of :func:`lindblad_action`."""
    d = hamiltonian.shape[0]
    eye = np.eye(d)
    sup = -1j * (np.kron(hamiltonian, eye) - np.kron(eye, hamiltonian.T))
    for j, rate in jumps:
        jdj = dag(j) @ j
        sup = sup + rate * (np.kron(j, j.conj()) - 0.5 * (np.kron(jdj, eye) + np.kron(eye, jdj.T)))
    return sup


def decompose_generator(R, rate_tol=RATE_TOL):
    """Split ``R`` into a Hamiltonian and ``(jump, rate)`` pairs.

    ``R`` is rotated into the Hermitian basis, whose first element is
    proportional to the identity.  The block orthogonal to the identity is
    diagonalized to give jump operators (unit Frobenius norm) and rates; the
    mixed row and column give the Hamiltonian.  Rates with magnitude below
    ``rate_tol`` are dropped as numerical noise.

    Raises:
        NonMarkovianError: an eigenvalue is below ``-rate_tol``.
    """
    R = np.asarray(R, dtype=np.complex128)
    d = int(round(np.sqrt(R.shape[0])))
    n = int(round(np.log2(d)))
    g = hermitian_basis(n)
    tau = np.eye(d * d).reshape(d * d, d, d)
    # tau_e = sum_a U_ae G_a with U_ae = tr(G_a tau_e)
    u = np.einsum("aij,eji->ae", g, tau)
    c = u @ R @ dag(u)
    c = (c + dag(c)) / 2

    k = c[0, 0] / (2 * d) * np.eye(d) + np.einsum("j,jab->ab", c[1:, 0], g[1:]) / np.sqrt(d)
    hamiltonian = 0.5j * (k - dag(k))
    hamiltonian = hamiltonian - np.trace(hamiltonian) / d * np.eye(d)

    rates, vecs = np.linalg.eigh(c[1:, 1:])
    if rates.size and rates.min() < -rate_tol:
        raise NonMarkovianError(f"generator has negative rate {rates.min():.3e}")
    jumps = []
    for rate, v in zip(rates[::-1], vecs.T[::-1]):
        if rate > rate_tol:
            jumps.append((np.einsum("j,jab->ab", v, g[1:]), float(rate)))
    return hamiltonian, jumps


def snapshot(fam, t, h=None):
    L = generator_L(fam, t, h)
    R = choi_from_generator(L, fam.n)
    hamiltonian, jumps = decompose_generator(R)
    return GeneratorSnapshot(t, L, R, hamiltonian, jumps)


# -- amplitude damping check ------------------------------------------------


def ad_generator_action(t1, t, rho):
    """Analytic amplitude-damping generator ``-(f'/f)(2 s- rho s+ - {s+ s-, rho})``.

    ``f(t) = sqrt(1 - lambda(t)) = exp(-t / 2T1)`` so ``f'/f = -1 / 2T1``.
    """
    f = np.exp(-t / (2 * t1))
    fdot = -f / (2 * t1)
    pm = SIGMA_PLUS @ SIGMA_MINUS
    return -(fdot / f) * (2 * SIGMA_MINUS @ rho @ SIGMA_PLUS - (pm @ rho + rho @ pm))


def _reference_states():
    plus = np.array([1, 1]) / np.sqrt(2)
    plus_i = np.array([1, 1j]) / np.sqrt(2)
    states = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.outer(plus, plus.conj()), np.outer(plus_i, plus_i.conj())]
    states.append(np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]]))
    return [s.astype(np.complex128) for s in states]


def verify_ad_generator(t1, t, h=None):
    """Max deviation between the extracted and analytic amplitude-damping generators.

    The extracted generator is applied through ``R`` to a fixed set of
    single-qubit states and compared entrywise with the analytic one.
    """
    if not 0 <= t <= 5 * t1:
        raise DomainError(f"t must lie in [0, 5 T1], got {t}")
    if h is None:
        h = DEFAULT_STEP * t1
    R = choi_R(amplitude_damping_family(t1), t, h)
    return max(numerics.max_abs(choi_action(R, rho) - ad_generator_action(t1, t, rho)) for rho in _reference_states())


def lindblad_scan(t1, times, h=None):
    """Snapshot rows ``(t, rates, deviation, status)`` for the amplitude-damping family.

    Times at which extraction fails are reported with a status string
    rather than raised.
    """
    fam = amplitude_damping_family(t1)
    step = DEFAULT_STEP * t1 if h is None else h
    rows = []
    for t in times:
        try:
            snap = snapshot(fam, t, step)
            dev = verify_ad_generator(t1, t, step)
            rows.append((t, snap.rates, dev, "ok"))
        except SingularityError:
            rows.append((t, [], float("nan"), "singular"))
        except NonMarkovianError:
            rows.append((t, [], float("nan"), "non_markovian"))
        except DomainError:
            rows.append((t, [], float("nan"), "out_of_domain"))
    return rows


def write_lindblad_csv(rows, fh):
    width = max((len(r[1]) for r in rows), default=0)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t"] + [f"rate_{k + 1}" for k in range(width)] + ["deviation", "status"])
    for t, rates, dev, status in rows:
        cells = [f"{r:.12g}" for r in rates] + [""] * (width - len(rates))
        writer.writerow([f"{t:.12g}"] + cells + [f"{dev:.12g}", status])
