"""Quantify what Pauli twirling discards from realistic qubit noise."""
from .channel import (
    KrausChannel,
    PauliExpansion,
    amplitude_damping,
    apply,
    compose,
    lambda_of_time,
    pauli_expansion,
    tensor,
    transfer_matrix,
)
from .kernels import BACKEND
from .twirl import PauliChannel, PtaRates, pta_rates, twirl_bruteforce, twirl_diagonal

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "KrausChannel",
    "PauliChannel",
    "PauliExpansion",
    "PtaRates",
    "amplitude_damping",
    "apply",
    "compose",
    "lambda_of_time",
    "pauli_expansion",
    "pta_rates",
    "tensor",
    "transfer_matrix",
    "twirl_bruteforce",
    "twirl_diagonal",
]
