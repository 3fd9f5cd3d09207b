"""Select the compiled kernels when available, else the pure-Python ones.

Set ``TWIRLKIT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

try:
    if os.environ.get("TWIRLKIT_PURE_PYTHON") == "1":
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "python"
_active = BACKENDS[BACKEND]

pta_orbit = _active.pta_orbit
pta_fixed_point = _active.pta_fixed_point
rk4_linear = _active.rk4_linear
