"""NumPy implementation of the hot kernels (fallback for ``_ckernels``).

Both backends expose the same two functions:

``theta_sum(mu, r, s, d, N, nodes, weights, with_cos)``
    ``sum_q w_q c_q sin(th_q)**(N-2) * (d**2 + 4 r s sin(th_q/2)**2)**(mu/2)``
    where ``c_q = cos(th_q)`` if ``with_cos`` else 1 and ``d = r - s`` is
    passed separately so callers can supply it without cancellation.

``assemble_n3(edges, mu, gx, gw)``
    Cell-pair integrals ``W_ij = int_i int_j r^2 s^2 |S^2| k(r, s) dr ds`` of the
    three-dimensional sphere kernel ``k``, via its closed form.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 22
_N3_FACTOR = 8.0 * np.pi**2


def theta_sum(mu, r, s, d, N, nodes, weights, with_cos=False):
    r = np.ascontiguousarray(r, dtype=float)
    s = np.ascontiguousarray(s, dtype=float)
    d = np.ascontiguousarray(d, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    wq = np.asarray(weights, dtype=float)
    half = np.sin(0.5 * nodes) ** 2
    if N != 2:
        wq = wq * np.sin(nodes) ** (N - 2)
    if with_cos:
        wq = wq * np.cos(nodes)
    out = np.empty(r.shape[0])
    step = max(1, _CHUNK // max(1, nodes.shape[0]))
    with np.errstate(divide="ignore", invalid="ignore"):
        for lo in range(0, r.shape[0], step):
            hi = lo + step
            base = d[lo:hi, None] ** 2 + 4.0 * (r[lo:hi] * s[lo:hi])[:, None] * half[None, :]
            out[lo:hi] = (base ** (0.5 * mu)) @ wq
    return out


def _power_over_p(x, p):
    if p == 0.0:
        return np.log(x)
    return x**p / p


def _g_plus(r, s, p):
    u = r + s
    with np.errstate(divide="ignore", invalid="ignore"):
        if p == 0.0:
            lu = np.where(u > 0, np.log(np.where(u > 0, u, 1.0)), 0.0)
            val = r * s * (0.5 * u * u * lu - 0.75 * u * u) - (u**4 * lu / 8.0 - 7.0 * u**4 / 32.0)
        else:
            val = (r * s * u ** (p + 2) - u ** (p + 4) / (p + 4)) / (p * (p + 1) * (p + 2))
    return val


def _g_minus(r, s, p):
    v = np.abs(r - s)
    with np.errstate(divide="ignore", invalid="ignore"):
        if p == 0.0:
            lv = np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), 0.0)
            val = -r * s * (0.5 * v * v * lv - 0.75 * v * v) - (v**4 * lv / 8.0 - 7.0 * v**4 / 32.0)
        else:
            val = -(r * s * v ** (p + 2) + v ** (p + 4) / (p + 4)) / (p * (p + 1) * (p + 2))
    return val


def _rect(g, a1, b1, a2, b2, p):
    return g(b1, b2, p) - g(a1, b2, p) - g(b1, a2, p) + g(a1, a2, p)


def assemble_n3(edges, mu, gx, gw):
    edges = np.ascontiguousarray(edges, dtype=float)
    gx = np.asarray(gx, dtype=float)
    gw = np.asarray(gw, dtype=float)
    p = mu + 2.0
    M = edges.shape[0] - 1
    lo, hi = edges[:-1], edges[1:]
    h = hi - lo
    R = lo[:, None] + h[:, None] * gx[None, :]
    WR = h[:, None] * gw[None, :] * R
    n = gx.shape[0]

    S = np.empty((M, M))
    T = np.empty((M, M))
    block = max(1, _CHUNK // (n * n * M))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i0 in range(0, M, block):
            i1 = min(M, i0 + block)
            Rb = R[i0:i1, :, None, None]
            FU = _power_over_p(Rb + R[None, None, :, :], p)
            S[i0:i1] = np.einsum("ia,iajb,jb->ij", WR[i0:i1], FU, WR, optimize=True)
            FV = _power_over_p(np.abs(Rb - R[None, None, :, :]), p)
            T[i0:i1] = np.einsum("ia,iajb,jb->ij", WR[i0:i1], FV, WR, optimize=True)

    iu, ju = np.triu_indices(M)
    hmax = np.maximum(h[iu], h[ju])
    near_origin = (lo[iu] + lo[ju]) <= 2.0 * hmax
    near_diag = (lo[ju] - hi[iu]) <= 2.0 * hmax

    i, j = iu[near_origin], ju[near_origin]
    S[i, j] = _rect(_g_plus, lo[i], hi[i], lo[j], hi[j], p)
    i, j = iu[near_diag], ju[near_diag]
    T[i, j] = _rect(_g_minus, lo[i], hi[i], lo[j], hi[j], p)

    W = np.zeros((M, M))
    W[iu, ju] = _N3_FACTOR * (S[iu, ju] - T[iu, ju])
    W[ju, iu] = W[iu, ju]
    return W
