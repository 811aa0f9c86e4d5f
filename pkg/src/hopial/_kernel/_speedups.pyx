# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: spec-program evaluation and RK4 shooting.

Mirrors hopial._kernel.fallback; new opcodes must be added to both.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp as c_exp, fabs, pow as c_pow

cnp.import_array()

BACKEND = "compiled"

DEF OP_CONST = 0
DEF OP_POW_LEFT = 1
DEF OP_POW_RIGHT = 2
DEF OP_EXP = 3
DEF OP_PWL = 4
DEF OP_STEP = 5
DEF OP_PPOLY = 6
DEF OP_ADD = 7
DEF OP_MUL = 8
DEF OP_POWER = 9
DEF OP_ABS = 10


cdef inline double _ipow(double x, int n) nogil:
    # exponentiation by squaring for small integer exponents
    cdef double acc = 1.0
    cdef double base = x
    cdef int m = n if n >= 0 else -n
    while m:
        if m & 1:
            acc *= base
        base *= base
        m >>= 1
    if n < 0:
        return 1.0 / acc
    return acc


cdef inline bint _small_int(double e) nogil:
    return e == <double> (<int> e) and -32.0 <= e <= 32.0


cdef inline Py_ssize_t _bucket(const double* breaks, Py_ssize_t nb, double x) nogil:
    # index of the piece containing x: searchsorted(breaks, x, 'right') - 1,
    # clipped to [0, nb - 2]
    cdef Py_ssize_t lo = 0, hi = nb, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if breaks[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    if lo > nb - 2:
        lo = nb - 2
    return lo


def eval_program(ops_in, fargs_in, iargs_in, data_in, xs_in, int stack_depth):
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ops = np.ascontiguousarray(ops_in, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] fargs = np.ascontiguousarray(fargs_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] iargs = np.ascontiguousarray(iargs_in, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] data = np.ascontiguousarray(data_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)

    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t n_ops = ops.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] stack = np.empty((max(stack_depth, 1), n), dtype=np.float64)

    cdef double* sbuf = <double*> stack.data
    cdef double* xbuf = <double*> xs.data
    cdef double* dbuf = <double*> data.data

    cdef Py_ssize_t top = 0  # number of occupied stack slots
    cdef Py_ssize_t k, i, off, m, deg, j, idx
    cdef int op
    cdef double c, alpha, anchor, beta, e, t, acc
    cdef double* cur
    cdef double* below

    with nogil:
        for k in range(n_ops):
            op = ops[k]
            if op == OP_ADD or op == OP_MUL or op == OP_POWER or op == OP_ABS:
                pass
            else:
                top += 1
            cur = sbuf + (top - 1) * n

            if op == OP_CONST:
                c = fargs[k, 0]
                for i in range(n):
                    cur[i] = c
            elif op == OP_POW_LEFT:
                c = fargs[k, 0]; alpha = fargs[k, 1]; anchor = fargs[k, 2]
                if alpha == 0.0:
                    for i in range(n):
                        cur[i] = c
                elif _small_int(alpha) and alpha > 0.0:
                    for i in range(n):
                        cur[i] = c * _ipow(xbuf[i] - anchor, <int> alpha)
                else:
                    for i in range(n):
                        cur[i] = c * c_pow(xbuf[i] - anchor, alpha)
            elif op == OP_POW_RIGHT:
                c = fargs[k, 0]; alpha = fargs[k, 1]; anchor = fargs[k, 2]
                if alpha == 0.0:
                    for i in range(n):
                        cur[i] = c
                elif _small_int(alpha) and alpha > 0.0:
                    for i in range(n):
                        cur[i] = c * _ipow(anchor - xbuf[i], <int> alpha)
                else:
                    for i in range(n):
                        cur[i] = c * c_pow(anchor - xbuf[i], alpha)
            elif op == OP_EXP:
                c = fargs[k, 0]; beta = fargs[k, 1]
                for i in range(n):
                    cur[i] = c * c_exp(beta * xbuf[i])
            elif op == OP_PWL:
                off = iargs[k, 0]; m = iargs[k, 1]
                for i in range(n):
                    t = xbuf[i]
                    if t <= dbuf[off]:
                        cur[i] = dbuf[off + m]
                    elif t >= dbuf[off + m - 1]:
                        cur[i] = dbuf[off + 2 * m - 1]
                    else:
                        idx = _bucket(dbuf + off, m, t)
                        cur[i] = dbuf[off + m + idx] + (
                            dbuf[off + m + idx + 1] - dbuf[off + m + idx]
                        ) * (t - dbuf[off + idx]) / (dbuf[off + idx + 1] - dbuf[off + idx])
            elif op == OP_STEP:
                off = iargs[k, 0]; m = iargs[k, 1]
                for i in range(n):
                    idx = _bucket(dbuf + off, m + 1, xbuf[i])
                    cur[i] = dbuf[off + m + 1 + idx]
            elif op == OP_PPOLY:
                off = iargs[k, 0]; m = iargs[k, 1]
                deg = <Py_ssize_t> fargs[k, 0]
                for i in range(n):
                    idx = _bucket(dbuf + off, m + 1, xbuf[i])
                    t = xbuf[i] - dbuf[off + idx]
                    acc = dbuf[off + m + 1 + idx * (deg + 1) + deg]
                    for j in range(deg - 1, -1, -1):
                        acc = acc * t + dbuf[off + m + 1 + idx * (deg + 1) + j]
                    cur[i] = acc
            elif op == OP_ADD:
                below = sbuf + (top - 2) * n
                for i in range(n):
                    below[i] = below[i] + cur[i]
                top -= 1
            elif op == OP_MUL:
                below = sbuf + (top - 2) * n
                for i in range(n):
                    below[i] = below[i] * cur[i]
                top -= 1
            elif op == OP_POWER:
                e = fargs[k, 0]
                if _small_int(e):
                    for i in range(n):
                        cur[i] = _ipow(cur[i], <int> e)
                else:
                    for i in range(n):
                        cur[i] = c_pow(cur[i], e)
            elif op == OP_ABS:
                for i in range(n):
                    cur[i] = fabs(cur[i])

    return stack[0].copy() if top == 1 else stack[top - 1].copy()


def shoot_quasilinear(r_half_in, m_half_in, double lam, double h, double p,
                      double u0=0.0, w0=None):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r_half = np.ascontiguousarray(r_half_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] m_half = np.ascontiguousarray(m_half_in, dtype=np.float64)
    cdef Py_ssize_t n = (r_half.shape[0] - 1) // 2
    cdef double inv_p = 1.0 / p
    cdef double u = u0
    cdef double w = r_half[0] if w0 is None else <double> w0
    cdef bint started_positive = u0 > 0.0
    cdef Py_ssize_t first_cross = -1
    cdef Py_ssize_t i
    cdef double r0, rh, r1, m0, mh, m1
    cdef double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w

    with nogil:
        for i in range(n):
            r0 = r_half[2 * i]; rh = r_half[2 * i + 1]; r1 = r_half[2 * i + 2]
            m0 = m_half[2 * i]; mh = m_half[2 * i + 1]; m1 = m_half[2 * i + 2]
            k1u = _du(u, w, r0, inv_p); k1w = _dw(u, w, m0, lam, p)
            k2u = _du(u + 0.5 * h * k1u, w + 0.5 * h * k1w, rh, inv_p)
            k2w = _dw(u + 0.5 * h * k1u, w + 0.5 * h * k1w, mh, lam, p)
            k3u = _du(u + 0.5 * h * k2u, w + 0.5 * h * k2w, rh, inv_p)
            k3w = _dw(u + 0.5 * h * k2u, w + 0.5 * h * k2w, mh, lam, p)
            k4u = _du(u + h * k3u, w + h * k3w, r1, inv_p)
            k4w = _dw(u + h * k3u, w + h * k3w, m1, lam, p)
            u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            if u <= 0.0 and (i >= 1 or started_positive) and first_cross < 0:
                first_cross = i
                break

    return u, w, first_cross


cdef inline double _du(double u, double w, double r, double inv_p) nogil:
    if w >= 0.0:
        return c_pow(w / r, inv_p)
    return -c_pow(-w / r, inv_p)


cdef inline double _dw(double u, double w, double m, double lam, double p) nogil:
    if p == 1.0:
        return -lam * m * u
    return -lam * m * c_pow(fabs(u), p - 1.0) * u
