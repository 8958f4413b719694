# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_kernels_py``; same signatures."""
import numpy as np

from libc.math cimport pow, log, fabs, sin, cos, M_PI


def theta_sum(double mu, r, s, d, int N, nodes, weights, bint with_cos=False):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t P = rv.shape[0], Q = th.shape[0], i, q
    cdef double[::1] half = np.empty(Q)
    cdef double[::1] wq = np.empty(Q)
    cdef double sn, acc, base, rs4, dd, e = 0.5 * mu
    for q in range(Q):
        sn = sin(0.5 * th[q])
        half[q] = sn * sn
        wq[q] = wt[q]
        if N != 2:
            wq[q] *= pow(sin(th[q]), N - 2)
        if with_cos:
            wq[q] *= cos(th[q])
    out = np.empty(P)
    cdef double[::1] o = out
    with nogil:
        for i in range(P):
            acc = 0.0
            rs4 = 4.0 * rv[i] * sv[i]
            dd = dv[i] * dv[i]
            for q in range(Q):
                base = dd + rs4 * half[q]
                acc += wq[q] * pow(base, e)
            o[i] = acc
    return out


cdef inline double _fp(double x, double p) nogil:
    if p == 0.0:
        return log(x)
    return pow(x, p) / p


cdef inline double _g_plus(double r, double s, double p) nogil:
    cdef double u = r + s, lu, u2
    if u == 0.0:
        return 0.0
    if p == 0.0:
        lu = log(u)
        u2 = u * u
        return r * s * (0.5 * u2 * lu - 0.75 * u2) - (u2 * u2 * lu / 8.0 - 7.0 * u2 * u2 / 32.0)
    return (r * s * pow(u, p + 2.0) - pow(u, p + 4.0) / (p + 4.0)) / (p * (p + 1.0) * (p + 2.0))


cdef inline double _g_minus(double r, double s, double p) nogil:
    cdef double v = fabs(r - s), lv, v2
    if v == 0.0:
        return 0.0
    if p == 0.0:
        lv = log(v)
        v2 = v * v
        return -r * s * (0.5 * v2 * lv - 0.75 * v2) - (v2 * v2 * lv / 8.0 - 7.0 * v2 * v2 / 32.0)
    return -(r * s * pow(v, p + 2.0) + pow(v, p + 4.0) / (p + 4.0)) / (p * (p + 1.0) * (p + 2.0))


def assemble_n3(edges, double mu, gx, gw):
    cdef const double[::1] e = np.ascontiguousarray(edges, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(gx, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(gw, dtype=np.float64)
    cdef Py_ssize_t M = e.shape[0] - 1, n = x.shape[0], i, j, a, b
    cdef double p = mu + 2.0
    cdef double factor = 8.0 * M_PI * M_PI
    cdef double[:, ::1] R = np.empty((M, n))
    cdef double[:, ::1] WR = np.empty((M, n))
    cdef double h, hmax, S, T, a1, b1, a2, b2, acc_s, acc_t, ri
    for i in range(M):
        h = e[i + 1] - e[i]
        for a in range(n):
            R[i, a] = e[i] + h * x[a]
            WR[i, a] = h * w[a] * R[i, a]
    out = np.zeros((M, M))
    cdef double[:, ::1] W = out
    with nogil:
        for i in range(M):
            a1 = e[i]
            b1 = e[i + 1]
            for j in range(i, M):
                a2 = e[j]
                b2 = e[j + 1]
                hmax = b1 - a1
                if b2 - a2 > hmax:
                    hmax = b2 - a2
                if a1 + a2 <= 2.0 * hmax:
                    S = (_g_plus(b1, b2, p) - _g_plus(a1, b2, p)
                         - _g_plus(b1, a2, p) + _g_plus(a1, a2, p))
                else:
                    S = 0.0
                    for a in range(n):
                        ri = R[i, a]
                        acc_s = 0.0
                        for b in range(n):
                            acc_s += WR[j, b] * _fp(ri + R[j, b], p)
                        S += WR[i, a] * acc_s
                if a2 - b1 <= 2.0 * hmax:
                    T = (_g_minus(b1, b2, p) - _g_minus(a1, b2, p)
                         - _g_minus(b1, a2, p) + _g_minus(a1, a2, p))
                else:
                    T = 0.0
                    for a in range(n):
                        ri = R[i, a]
                        acc_t = 0.0
                        for b in range(n):
                            acc_t += WR[j, b] * _fp(fabs(ri - R[j, b]), p)
                        T += WR[i, a] * acc_t
                W[i, j] = factor * (S - T)
                W[j, i] = W[i, j]
    return out
