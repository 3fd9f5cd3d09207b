"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` (or ``float64``
where a quantity is known to be real).  Validation tolerances live in the
module-level :data:`settings` object so every module checks Hermiticity and
positivity the same way.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularityError


@dataclass
class Settings:
    """Global numerical knobs.

    Attributes:
        atol: tolerance for Hermiticity, positivity and trace checks.
        cond_cap: largest condition number accepted by :func:`solve_linear`.
    """

    atol: float = 1e-10
    cond_cap: float = 1e12


settings = Settings()


def as_matrix(a):
    """Return ``a`` as a 2-D complex array, raising on other ranks."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def _require_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")


def dag(a):
    """Conjugate transpose."""
    return np.conj(np.swapaxes(a, -1, -2))


def mat_exp(a):
    """Matrix exponential ``e^A`` by scaling and squaring with a Padé core.

    Raises:
        DimensionError: if ``a`` is not square.
    """
    m = as_matrix(a)
    _require_square(m)
    return scipy.linalg.expm(m)


def kron(*factors):
    """Kronecker product of one or more matrices, left to right."""
    if not factors:
        raise DimensionError("kron needs at least one factor")
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def solve_linear(a, b, cond_cap=None):
    """Solve ``A X = B`` for ``X``.

    The condition number of ``A`` is checked first; matrices beyond
    ``cond_cap`` (default :attr:`Settings.cond_cap`) raise instead of returning
    an inaccurate solution.

    Raises:
        DimensionError: non-square ``A`` or mismatched row counts.
        SingularityError: ``A`` is singular or too ill-conditioned.
    """
    a = as_matrix(a)
    b = np.asarray(b, dtype=np.complex128)
    _require_square(a, "A")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"cannot solve {a.shape} system with right-hand side {b.shape}")
    cap = settings.cond_cap if cond_cap is None else cond_cap
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > cap:
        raise SingularityError("matrix is singular or ill-conditioned", cond)
    return np.linalg.solve(a, b)


def is_hermitian(a, tol=None):
    """True iff ``max|A - A^dagger| <= tol``."""
    tol = settings.atol if tol is None else tol
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - dag(a)), initial=0.0) <= tol)


def is_psd(a, tol=None):
    """True iff ``a`` is Hermitian with all eigenvalues ``>= -tol``."""
    tol = settings.atol if tol is None else tol
    if not is_hermitian(a, tol):
        return False
    h = (np.asarray(a) + dag(np.asarray(a))) / 2
    return bool(np.linalg.eigvalsh(h).min() >= -tol)


def is_unitary(u, tol=None):
    tol = settings.atol if tol is None else tol
    u = np.asarray(u)
    return bool(np.max(np.abs(dag(u) @ u - np.eye(u.shape[0]))) <= tol)


def max_abs(a):
    """Entrywise max-norm, 0 for empty input."""
    return float(np.max(np.abs(a), initial=0.0))
