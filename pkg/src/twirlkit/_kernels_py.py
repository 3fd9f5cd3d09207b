"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the compiled module; this one is used when the
extension is unavailable or ``TWIRLKIT_PURE_PYTHON=1`` is set.
"""
import numpy as np


def _klein_step(q, p):
    return (
        q[0] * p[0] + q[1] * p[1] + q[2] * p[2] + q[3] * p[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] + p[3] * q[2],
        p[0] * q[2] + p[2] * q[0] + p[3] * q[1] + p[1] * q[3],
        p[0] * q[3] + p[3] * q[0] + p[2] * q[1] + p[1] * q[2],
    )


def pta_orbit(single_step, start, steps):
    q = tuple(float(x) for x in single_step)
    p = tuple(float(x) for x in start)
    rows = [p]
    for _ in range(steps):
        p = _klein_step(q, p)
        rows.append(p)
    return np.array(rows, dtype=np.float64).reshape(steps + 1, 4)


def pta_fixed_point(single_step, start, tol, max_iter):
    q = tuple(float(x) for x in single_step)
    p = tuple(float(x) for x in start)
    rows = [p]
    k = 0
    while True:
        nxt = _klein_step(q, p)
        if max(abs(a - b) for a, b in zip(nxt, p)) < tol or k >= max_iter:
            break
        k += 1
        p = nxt
        rows.append(p)
    return np.array(rows, dtype=np.float64)


def rk4_linear(generator, y0, dt, nsteps, record_every=1):
    m = np.ascontiguousarray(generator, dtype=np.complex128)
    y = np.array(y0, dtype=np.complex128)
    out = [y.copy()]
    for step in range(1, nsteps + 1):
        k1 = m @ y
        k2 = m @ (y + 0.5 * dt * k1)
        k3 = m @ (y + 0.5 * dt * k2)
        k4 = m @ (y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % record_every == 0 or step == nsteps:
            out.append(y.copy())
    return np.array(out)
