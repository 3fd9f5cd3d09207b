"""Quantum channels in Kraus form and their matrix representations.

A channel ``rho -> sum_m E_m rho E_m^dagger`` is stored as a
:class:`KrausChannel`.  From it we derive

* the transfer matrix ``F_kl = tr(G_k Lambda(G_l))`` over the normalized
  Hermitian Pauli basis,
* the Pauli expansion (process or chi matrix) ``c`` with
  ``Lambda(rho) = sum_ij c_ij P_i rho P_j`` over unnormalized Paulis,
* the row-major superoperator ``S`` with ``vec(Lambda(rho)) = S vec(rho)``.
"""
import os
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import CapacityError, DimensionError, DomainError, ValidationError
from .numerics import dag
from .pauli import MAX_QUBITS, hermitian_basis, pauli_matrices

MAX_CHI_QUBITS = 3


def _qubits_for_dim(d):
    n = int(round(np.log2(d)))
    if d < 2 or 2**n != d:
        raise DimensionError(f"dimension {d} is not a power of two")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive map given by its Kraus operators.

    The constructor validates ``sum_m E_m^dagger E_m``: equal to the identity
    when ``trace_preserving`` is set, otherwise bounded above by it.
    """

    kraus: tuple
    trace_preserving: bool = True
    n: int = field(init=False)

    def __post_init__(self):
        ops = tuple(numerics.as_matrix(k) for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimensionError(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "n", _qubits_for_dim(d))

        tol = numerics.settings.atol
        gram = sum(dag(k) @ k for k in ops)
        if self.trace_preserving:
            dev = numerics.max_abs(gram - np.eye(d))
            if dev > tol:
                raise ValidationError(f"Kraus operators are not trace preserving (deviation {dev:.3e})")
        elif not numerics.is_psd(np.eye(d) - gram, tol):
            raise ValidationError("Kraus operators are not trace non-increasing")

    @property
    def dim(self):
        return 2**self.n

    def __call__(self, rho):
        return apply(self, rho)

    def __len__(self):
        return len(self.kraus)


@dataclass(frozen=True)
class PauliExpansion:
    """Coefficients ``c`` such that ``Lambda(rho) = sum_ij c_ij P_i rho P_j``."""

    n: int
    coeffs: np.ndarray

    def reconstruct(self, rho):
        """Apply the channel through its Pauli expansion."""
        paulis = pauli_matrices(self.n)
        left = np.einsum("iab,bc->iac", paulis, rho)
        out = np.einsum("ij,iac,jcd->ad", self.coeffs, left, paulis)
        return out

    def diagonal(self):
        return np.real(np.diag(self.coeffs)).copy()


# -- density matrices ---------------------------------------------------------


def validate_density_matrix(rho, relaxed=False, tol=None):
    """Check Hermiticity, unit trace (or ``tr <= 1`` if ``relaxed``) and positivity.

    Returns ``rho`` as a complex array; raises :class:`ValidationError`.
    """
    tol = numerics.settings.atol if tol is None else tol
    rho = numerics.as_matrix(rho)
    _qubits_for_dim(rho.shape[0])
    if not numerics.is_hermitian(rho, tol):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if relaxed:
        if tr > 1 + tol:
            raise ValidationError(f"trace {tr} exceeds one")
    elif abs(tr - 1) > tol:
        raise ValidationError(f"trace {tr} is not one")
    if np.linalg.eigvalsh((rho + dag(rho)) / 2).min() < -tol:
        raise ValidationError("density matrix has negative eigenvalues")
    return rho


def basis_state(bits):
    """Projector onto a computational basis state given as a bit string like ``"11"``."""
    d = 2 ** len(bits)
    i = int(bits, 2)
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[i, i] = 1
    return rho


def pure_state(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


# -- constructors --------------------------------------------------------------


def identity_channel(n=1):
    return KrausChannel((np.eye(2**n, dtype=np.complex128),))


def unitary_channel(u):
    return KrausChannel((numerics.as_matrix(u),))


def amplitude_damping(lam):
    """Single-qubit amplitude damping with decay probability ``lam``."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"damping probability must lie in [0, 1], got {lam}")
    e1 = np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=np.complex128)
    e2 = np.array([[0, np.sqrt(lam)], [0, 0]], dtype=np.complex128)
    return KrausChannel((e1, e2))


def lambda_of_time(t_step, t1):
    """Decay probability ``1 - exp(-t_step / T1)`` after a step of length ``t_step``."""
    if t1 <= 0:
        raise DomainError(f"T1 must be positive, got {t1}")
    if t_step < 0:
        raise DomainError(f"time step must be nonnegative, got {t_step}")
    return -np.expm1(-t_step / t1)


def pauli_channel(probs):
    """Pauli channel ``sum_m p_m P_m rho P_m`` from a probability vector of length 4^n."""
    probs = np.asarray(probs, dtype=float)
    n = 0
    while 4**n < len(probs):
        n += 1
    if n == 0 or 4**n != len(probs):
        raise DimensionError(f"{len(probs)} is not a power of four")
    if probs.min() < -1e-12:
        raise ValidationError("Pauli probabilities must be nonnegative")
    paulis = pauli_matrices(n)
    kraus = [np.sqrt(max(p, 0.0)) * paulis[m] for m, p in enumerate(probs) if p > 0]
    if not kraus:
        raise ValidationError("Pauli probabilities are all zero")
    return KrausChannel(tuple(kraus))


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _default_rng(seed):
    if seed is None:
        env = os.environ.get("TWIRLKIT_SEED")
        seed = int(env) if env else None
    return np.random.default_rng(seed)


def random_channel(n, rank=None, seed=None):
    """Random CPTP channel from a Haar isometry (Stinespring dilation).

    ``rank`` Kraus operators of size 2^n are read off a Haar-random isometry
    from the system into system x environment.  When ``seed`` is omitted the
    ``TWIRLKIT_SEED`` environment variable is consulted.
    """
    rng = seed if isinstance(seed, np.random.Generator) else _default_rng(seed)
    d = 2**n
    rank = d * d if rank is None else rank
    u = random_unitary(d * rank, rng)
    iso = u[:, :d]
    kraus = iso.reshape(rank, d, d)
    return KrausChannel(tuple(kraus))


def random_density_matrix(n, seed=None, rank=None):
    """Random density matrix from the induced (Hilbert-Schmidt) measure."""
    rng = seed if isinstance(seed, np.random.Generator) else _default_rng(seed)
    d = 2**n
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


# -- operations -------------------------------------------------------------


def apply(ch, rho):
    """``sum_m E_m rho E_m^dagger``."""
    rho = numerics.as_matrix(rho)
    if rho.shape != (ch.dim, ch.dim):
        raise DimensionError(f"state of shape {rho.shape} does not fit a {ch.n}-qubit channel")
    ks = np.array(ch.kraus)
    return np.einsum("mab,bc,mdc->ad", ks, rho, ks.conj())


def compose(outer, inner):
    """Kraus set of ``outer after inner``: ``{A_i B_j}``."""
    if outer.dim != inner.dim:
        raise DimensionError(f"cannot compose {outer.n}-qubit and {inner.n}-qubit channels")
    kraus = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    return KrausChannel(kraus, trace_preserving=outer.trace_preserving and inner.trace_preserving)


def tensor(a, b):
    """Channel acting as ``a`` on the left register and ``b`` on the right."""
    kraus = tuple(np.kron(x, y) for x in a.kraus for y in b.kraus)
    return KrausChannel(kraus, trace_preserving=a.trace_preserving and b.trace_preserving)


def tensor_power(ch, n):
    out = ch
    for _ in range(n - 1):
        out = tensor(out, ch)
    return out


def transfer_matrix(ch):
    """Real 4^n x 4^n matrix ``F_kl = tr(G_k Lambda(G_l))``."""
    g = hermitian_basis(ch.n)
    ks = np.array(ch.kraus)
    # Lambda(G_l) for every l at once
    out = np.einsum("mab,lbc,mdc->lad", ks, g, ks.conj())
    # Kraus maps preserve Hermiticity, so the imaginary part is round-off only.
    return np.einsum("kab,lba->kl", g, out).real


def superoperator(ch):
    """Row-major superoperator ``sum_m E_m (x) conj(E_m)``."""
    return sum(np.kron(k, k.conj()) for k in ch.kraus)


def pauli_expansion(ch):
    """Chi matrix of ``ch`` over unnormalized Paulis.

    Each Kraus operator is expanded as ``E_m = sum_i a_mi P_i`` with
    ``a_mi = tr(P_i E_m) / 2^n`` and ``c_ij = sum_m a_mi conj(a_mj)``.
    """
    if ch.n > MAX_CHI_QUBITS:
        raise CapacityError(f"chi matrices are limited to {MAX_CHI_QUBITS} qubits, got {ch.n}")
    paulis = pauli_matrices(ch.n)
    ks = np.array(ch.kraus)
    a = np.einsum("iab,mba->mi", paulis, ks) / ch.dim
    c = a.T @ a.conj()
    return PauliExpansion(ch.n, c)


# -- text serialization ------------------------------------------------------------


def _fmt_complex(z):
    return f"{z.real:.17g}{z.imag:+.17g}j"


def dumps_channel(ch):
    """Serialize a channel to the plain-text Kraus format read by :func:`loads_channel`."""
    lines = [f"n = {ch.n}", f"trace_preserving = {'true' if ch.trace_preserving else 'false'}"]
    for k in ch.kraus:
        lines.append("kraus")
        lines.extend(", ".join(_fmt_complex(z) for z in row) for row in k)
    return "\n".join(lines) + "\n"


def loads_channel(text):
    """Parse the Kraus text format.

    Layout::

        n = 1
        trace_preserving = true
        kraus
        1+0j, 0+0j
        0+0j, 0.5+0j
        kraus
        ...

    Blank lines and ``#`` comments are ignored.  Raises ``ValueError`` for
    malformed text and :class:`ValidationError` for non-CPTP operators.
    """
    header = {}
    blocks = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "kraus":
            blocks.append([])
        elif "=" in line and not blocks:
            key, value = (s.strip() for s in line.split("=", 1))
            header[key.lower()] = value
        elif blocks:
            blocks[-1].append([complex(tok.replace(" ", "")) for tok in line.split(",")])
        else:
            raise ValueError(f"unexpected line before first kraus block: {raw!r}")
    if "n" not in header:
        raise ValueError("missing 'n = <qubits>' header")
    n = int(header["n"])
    tp_text = header.get("trace_preserving", "true").lower()
    if tp_text not in ("true", "false"):
        raise ValueError(f"trace_preserving must be true or false, got {tp_text!r}")
    if not blocks:
        raise ValueError("no kraus blocks found")
    d = 2**n
    kraus = []
    for rows in blocks:
        m = np.array(rows, dtype=np.complex128)
        if m.shape != (d, d):
            raise ValueError(f"kraus block has shape {m.shape}, expected {(d, d)}")
        kraus.append(m)
    return KrausChannel(tuple(kraus), trace_preserving=tp_text == "true")


def load_channel(path):
    with open(path, encoding="utf-8") as fh:
        return loads_channel(fh.read())
