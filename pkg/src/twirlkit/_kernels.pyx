# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: the iterated Pauli-channel map and fixed-step RK4."""
import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemv

cnp.import_array()


cdef inline void _klein_step(const double* q, const double* p, double* out) noexcept nogil:
    # composition of two single-qubit Pauli channels (Klein group convolution)
    out[0] = q[0] * p[0] + q[1] * p[1] + q[2] * p[2] + q[3] * p[3]
    out[1] = p[0] * q[1] + p[1] * q[0] + p[2] * q[3] + p[3] * q[2]
    out[2] = p[0] * q[2] + p[2] * q[0] + p[3] * q[1] + p[1] * q[3]
    out[3] = p[0] * q[3] + p[3] * q[0] + p[2] * q[1] + p[1] * q[2]


def pta_orbit(single_step, start, Py_ssize_t steps):
    """Rows ``k = 0..steps`` of repeatedly composing ``start`` with ``single_step``."""
    cdef double[::1] q = np.ascontiguousarray(single_step, dtype=np.float64)
    out_arr = np.empty((steps + 1, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t k, i
    cdef double[::1] s = np.ascontiguousarray(start, dtype=np.float64)
    for i in range(4):
        out[0, i] = s[i]
    with nogil:
        for k in range(steps):
            _klein_step(&q[0], &out[k, 0], &out[k + 1, 0])
    return out_arr


def pta_fixed_point(single_step, start, double tol, Py_ssize_t max_iter):
    """Orbit truncated at the first ``k`` with ``max|p_{k+1} - p_k| < tol``."""
    cdef double[::1] q = np.ascontiguousarray(single_step, dtype=np.float64)
    cdef double[::1] s = np.ascontiguousarray(start, dtype=np.float64)
    buf_arr = np.empty((max_iter + 1, 4), dtype=np.float64)
    cdef double[:, ::1] buf = buf_arr
    cdef double nxt[4]
    cdef double delta
    cdef Py_ssize_t k = 0, i
    for i in range(4):
        buf[0, i] = s[i]
    with nogil:
        while True:
            _klein_step(&q[0], &buf[k, 0], nxt)
            delta = 0.0
            for i in range(4):
                if abs(nxt[i] - buf[k, i]) > delta:
                    delta = abs(nxt[i] - buf[k, i])
            if delta < tol or k >= max_iter:
                break
            k += 1
            for i in range(4):
                buf[k, i] = nxt[i]
    return buf_arr[: k + 1].copy()


cdef inline void _matvec(const double complex[:, ::1] m, double complex* x,
                         double complex* y, Py_ssize_t n) noexcept nogil:
    # y = M x for row-major M: BLAS sees the column-major transpose, so use trans='T'
    cdef char trans = b"T"
    cdef int nn = <int>n, inc = 1
    cdef double complex one = 1.0, zero = 0.0
    zgemv(&trans, &nn, &nn, &one, <double complex*>&m[0, 0], &nn, x, &inc, &zero, y, &inc)


def rk4_linear(generator, y0, double dt, Py_ssize_t nsteps, Py_ssize_t record_every=1):
    """Classical RK4 for ``y' = M y`` with fixed step; returns every ``record_every``-th state."""
    cdef double complex[:, ::1] m = np.ascontiguousarray(generator, dtype=np.complex128)
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t nrec = nsteps // record_every + 1
    if nsteps % record_every:
        nrec += 1
    out_arr = np.empty((nrec, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    work_arr = np.empty((6, n), dtype=np.complex128)
    cdef double complex[:, ::1] w = work_arr
    cdef double complex[::1] y = np.array(y0, dtype=np.complex128)
    cdef Py_ssize_t step, i, r = 0
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    for i in range(n):
        out[0, i] = y[i]
    r = 1
    with nogil:
        for step in range(1, nsteps + 1):
            _matvec(m, &y[0], &w[0, 0], n)
            for i in range(n):
                w[4, i] = y[i] + half * w[0, i]
            _matvec(m, &w[4, 0], &w[1, 0], n)
            for i in range(n):
                w[4, i] = y[i] + half * w[1, i]
            _matvec(m, &w[4, 0], &w[2, 0], n)
            for i in range(n):
                w[4, i] = y[i] + dt * w[2, i]
            _matvec(m, &w[4, 0], &w[3, 0], n)
            for i in range(n):
                y[i] = y[i] + sixth * (w[0, i] + 2 * w[1, i] + 2 * w[2, i] + w[3, i])
            if step % record_every == 0 or step == nsteps:
                for i in range(n):
                    out[r, i] = y[i]
                r += 1
    return out_arr
