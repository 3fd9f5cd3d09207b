"""Continuous-time error correction on the three-qubit bit-flip code.

Correction is a jump process at rate ``beta``: in time ``dt`` the recovery
map ``R`` fires with probability ``beta dt``.  Combined with a noise
generator ``L`` the state obeys

    rho_dot = L(rho) + beta (R(rho) - rho),

integrated here with fixed-step RK4 on the row-major vectorized state.
"""
import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels, numerics
from .channel import KrausChannel, amplitude_damping, apply, lambda_of_time, pure_state, superoperator
from .errors import ConfigurationError, DimensionError, IntegrationError, ValidationError
from .lindblad import amplitude_damping_family, lindblad_superoperator, snapshot
from .pauli import SIGMA, embed
from .twirl import pta_rates, twirl_diagonal

STABILITY_LIMIT = 0.5
CODE_QUBITS = 3


@dataclass(frozen=True)
class RecoveryMap:
    n: int
    map: KrausChannel

    def __post_init__(self):
        if not self.map.trace_preserving:
            raise ValidationError("recovery map must be trace preserving")

    def __call__(self, rho):
        return apply(self.map, rho)

    def superoperator(self):
        return superoperator(self.map)


def codeword(alpha=0.0, beta=1.0):
    """``alpha |000> + beta |111>``, normalized; defaults to the logical one."""
    psi = np.zeros(8, dtype=np.complex128)
    psi[0], psi[7] = alpha, beta
    return psi / np.linalg.norm(psi)


def recovery_three_qubit_bitflip():
    """Measure ``Z1Z2`` and ``Z2Z3`` and undo the single bit flip the syndrome points to."""
    z = SIGMA["Z"]
    eye = np.eye(8)
    s12 = embed(z, 0, 3) @ embed(z, 1, 3)
    s23 = embed(z, 1, 3) @ embed(z, 2, 3)
    corrections = {(1, 1): eye, (-1, 1): embed(SIGMA["X"], 0, 3), (-1, -1): embed(SIGMA["X"], 1, 3), (1, -1): embed(SIGMA["X"], 2, 3)}
    kraus = []
    for (a, b), fix in corrections.items():
        proj = (eye + a * s12) @ (eye + b * s23) / 4
        kraus.append(fix @ proj)
    return RecoveryMap(3, KrausChannel(tuple(kraus)))


def identity_recovery(n=CODE_QUBITS):
    return RecoveryMap(n, KrausChannel((np.eye(2**n, dtype=np.complex128),)))


# -- noise generators --------------------------------------------------------


def local_generator(hamiltonian, jumps, n_qubits=CODE_QUBITS):
    """Sum of one single-qubit Lindblad generator acting on each qubit."""
    total = 0
    for q in range(n_qubits):
        h = embed(hamiltonian, q, n_qubits)
        js = [(embed(j, q, n_qubits), rate) for j, rate in jumps]
        total = total + lindblad_superoperator(h, js)
    return total


def bit_flip_generator(rate, n_qubits=CODE_QUBITS):
    """Independent ``X`` flips on every qubit at ``rate``."""
    return local_generator(np.zeros((2, 2), dtype=np.complex128), [(SIGMA["X"], rate)], n_qubits)


def exact_ad_generator(t1, n_qubits=CODE_QUBITS, t=0.0):
    """Amplitude-damping generator on each qubit, extracted from the channel family."""
    snap = snapshot(amplitude_damping_family(t1), t)
    return local_generator(snap.hamiltonian, snap.jumps, n_qubits)


def pta_generator(t1, t_step, n_qubits=CODE_QUBITS):
    """Pauli-rate generator from the twirled single-step amplitude-damping channel."""
    rates = pta_rates(twirl_diagonal(amplitude_damping(lambda_of_time(t_step, t1))), t_step)
    return local_generator(np.zeros((2, 2), dtype=np.complex128), rates.jumps(), n_qubits)


# -- integration ---------------------------------------------------------------


@dataclass
class CtqecRun:
    noise_generator: np.ndarray
    recovery: Optional[RecoveryMap]
    beta: float
    rho0: np.ndarray
    dt: float
    t_end: float
    target: Optional[np.ndarray] = None
    record_every: int = 1

    def __post_init__(self):
        self.noise_generator = np.asarray(self.noise_generator, dtype=np.complex128)
        self.rho0 = numerics.as_matrix(self.rho0)
        d = self.rho0.shape[0]
        if self.noise_generator.shape != (d * d, d * d):
            raise DimensionError(f"generator shape {self.noise_generator.shape} does not match a {d}x{d} state")
        if self.recovery is not None and self.recovery.map.dim != d:
            raise DimensionError("recovery map dimension does not match the state")
        if self.beta < 0:
            raise ConfigurationError(f"beta must be nonnegative, got {self.beta}")
        if self.dt <= 0 or self.t_end < 0:
            raise ConfigurationError("need dt > 0 and t_end >= 0")
        if self.dt * self.stability_norm() >= STABILITY_LIMIT:
            raise ConfigurationError(
                f"dt={self.dt:g} violates the stability bound; need dt < {self.max_stable_dt():.6g}"
            )

    def stability_norm(self):
        return np.linalg.norm(self.noise_generator, 2) + 2 * self.beta

    def max_stable_dt(self):
        return STABILITY_LIMIT / self.stability_norm()

    def generator(self):
        """``L + beta (R - id)`` as a row-major superoperator."""
        g = self.noise_generator.copy()
        if self.recovery is not None and self.beta:
            g += self.beta * (self.recovery.superoperator() - np.eye(g.shape[0]))
        return g


def rhs(run, rho):
    """``L(rho) + beta (R(rho) - rho)``."""
    rho = numerics.as_matrix(rho)
    d = run.rho0.shape[0]
    if rho.shape != (d, d):
        raise DimensionError(f"state shape {rho.shape} does not match {d}x{d}")
    out = (run.noise_generator @ rho.reshape(-1)).reshape(d, d)
    if run.recovery is not None:
        out = out + run.beta * (run.recovery(rho) - rho)
    return out


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    fidelity: np.ndarray
    trace: np.ndarray = field(init=False)

    def __post_init__(self):
        self.trace = np.real(np.trace(self.states, axis1=1, axis2=2))


def _target_vector(run):
    if run.target is not None:
        psi = np.asarray(run.target, dtype=np.complex128)
        return psi / np.linalg.norm(psi)
    w, v = np.linalg.eigh(run.rho0)
    return v[:, -1]


def evolve(run):
    """Integrate the run and record fidelity with the initial codeword.

    Raises:
        IntegrationError: trace drifts by more than ``1e-8`` per unit time.
    """
    d = run.rho0.shape[0]
    nsteps = max(int(np.ceil(run.t_end / run.dt - 1e-9)), 0)
    h = run.t_end / nsteps if nsteps else 0.0
    flat = kernels.rk4_linear(run.generator(), run.rho0.reshape(-1), h, nsteps, run.record_every)
    states = flat.reshape(-1, d, d)
    steps = np.arange(0, nsteps + 1, run.record_every)
    if steps[-1] != nsteps:
        steps = np.append(steps, nsteps)
    times = steps * h
    psi = _target_vector(run)
    fid = np.real(np.einsum("i,kij,j->k", psi.conj(), states, psi))
    traj = Trajectory(times, states, fid)
    drift = np.abs(traj.trace - np.trace(run.rho0).real)
    if np.any(drift > 1e-8 * times + 1e-12):
        raise IntegrationError(f"trace drifted by {drift.max():.3e}")
    return traj


def evolve_exact(run, times=None):
    """Reference solution ``exp((L + beta(R - id)) t) rho0`` at the given times."""
    d = run.rho0.shape[0]
    times = np.array([run.t_end]) if times is None else np.asarray(times)
    g = run.generator()
    return np.array([(numerics.mat_exp(g * t) @ run.rho0.reshape(-1)).reshape(d, d) for t in times])


@dataclass
class NoiseComparison:
    beta: float
    times: np.ndarray
    exact: Trajectory
    pta: Trajectory

    @property
    def gap(self):
        return self.exact.fidelity - self.pta.fidelity


def compare_noise_models(t1, beta, t_end, dt, t_step=None, psi=None, record_every=1):
    """Run the code under exact amplitude damping and under its twirled rates.

    ``t_step`` is the step whose twirled channel defines the Pauli rates
    (default ``0.01 T1``); ``psi`` is the initial codeword (default ``|111>``).
    """
    t_step = 0.01 * t1 if t_step is None else t_step
    psi = codeword() if psi is None else np.asarray(psi, dtype=np.complex128)
    rho0 = pure_state(psi)
    rec = recovery_three_qubit_bitflip()
    runs = [
        CtqecRun(gen, rec, beta, rho0, dt, t_end, psi, record_every)
        for gen in (exact_ad_generator(t1), pta_generator(t1, t_step))
    ]
    exact, pta = (evolve(r) for r in runs)
    return NoiseComparison(beta, exact.times, exact, pta)


def write_ctqec_csv(comparisons, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["beta", "t", "fidelity_exact", "fidelity_pta", "gap", "trace_exact", "trace_pta"])
    for c in comparisons:
        for k, t in enumerate(c.times):
            writer.writerow(
                [f"{c.beta:.12g}", f"{t:.12g}"]
                + [f"{v:.12g}" for v in (c.exact.fidelity[k], c.pta.fidelity[k], c.gap[k], c.exact.trace[k], c.pta.trace[k])]
            )
