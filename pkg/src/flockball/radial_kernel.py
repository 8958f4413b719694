"""Sphere-averaged power kernels, ball potentials and cell-pair kernel matrices.

For ``mu > -N`` and radii ``r, s >= 0`` the sphere kernel is

    k_mu(r, s) = int_{S^{N-1}} |r e - s w|^mu dw
               = |S^{N-2}| int_0^pi sin(t)^(N-2) ((r-s)^2 + 4 r s sin(t/2)^2)^(mu/2) dt,

and the unit-ball potential is ``phi_mu(r) = int_0^1 s^(N-1) k_mu(r, s) ds``.
Three dimensions have closed forms, used as the fast path; every other
dimension goes through graded Gauss-Legendre rules.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Any, Mapping

import numpy as np

from . import _backend
from .errors import (
    DivergentIntegralError,
    DomainError,
    NonIntegrableError,
    RegimeError,
    SurfaceDivergence,
    ToleranceNotMet,
)
from .geometry import sphere_area
from .quadrature import (
    DEFAULT_QUAD,
    QuadratureSpec,
    cell_nodes,
    gauss_legendre,
    graded_offsets,
    graded_rule,
    levels_for_exponent,
    theta_rule,
)

DIVERGENCE_THRESHOLD = 1e-6
_MAX_ANGULAR_LEVELS = 1060
# closed forms for phi and phi' in N = 3 are used on this r-window only
_N3_CLOSED_WINDOW = (1e-2, 4.0)


@dataclass(frozen=True)
class KernelParams:
    """Dimension ``N``, attraction exponent ``alpha`` and repulsion exponent ``lam``."""

    N: int
    alpha: float
    lam: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise RegimeError(f"N must be an integer >= 1, got {self.N!r}")
        if not self.alpha > 0:
            raise RegimeError(f"alpha must be > 0, got {self.alpha!r}")
        if not 0 < self.lam < self.N:
            raise RegimeError(f"lambda must lie in (0, N) = (0, {self.N}), got {self.lam!r}")

    @property
    def energy_regime(self) -> bool:
        return self.lam < self.N - 1

    @classmethod
    def from_mapping(cls, d: Mapping[str, Any]) -> "KernelParams":
        lam = d["lambda"] if "lambda" in d else d["lam"]
        return cls(N=int(d["N"]), alpha=float(d["alpha"]), lam=float(lam))

    def as_dict(self) -> dict:
        return {"N": self.N, "alpha": self.alpha, "lambda": self.lam}


# ---------------------------------------------------------------------------
# sphere kernel


def _angular_levels(mu, r, s, d, N, quad):
    """Per-point number of dyadic angular levels."""
    geo = np.sqrt(r * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(d) > 0, np.pi * geo / np.abs(d), np.inf)
    lev = np.full(r.shape, 2, dtype=np.int64)
    finite = np.isfinite(ratio) & (ratio > 1)
    lev[finite] = np.ceil(np.log2(ratio[finite])).astype(np.int64) + quad.angular_margin
    if np.any(~np.isfinite(ratio)):
        beta = mu + N - 2
        lev[~np.isfinite(ratio)] = levels_for_exponent(beta, quad.rel_tol, cap=_MAX_ANGULAR_LEVELS)
    return np.clip(lev, 2, _MAX_ANGULAR_LEVELS)


def _theta_integral(mu, r, s, d, N, quad, with_cos=False, backend=None):
    """``|S^{N-2}|`` times the angular integral, grouped by required grading."""
    be = backend or _backend.backend
    out = np.empty(r.shape)
    lev = _angular_levels(mu, r, s, d, N, quad)
    for L in np.unique(lev):
        sel = lev == L
        th, wt = theta_rule(int(L), quad.angular_nodes)
        out[sel] = be.theta_sum(float(mu), r[sel], s[sel], d[sel], int(N), th, wt, bool(with_cos))
    return sphere_area(N - 1) * out


def _kernel_n3(mu, big, x):
    """``k_mu`` in N = 3 at ``max = big``, ``min/max = x`` in (0, 1]."""
    p = mu + 2.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if p == 0.0:
            core = np.where(x < 1, 2.0 * np.arctanh(np.minimum(x, 1.0)), np.inf)
        else:
            a = p * np.log1p(x)
            b = p * np.log1p(-np.minimum(x, 1 - 1e-300))
            core = np.exp(b) * np.expm1(a - b) / p
            edge = (2.0**p / p) if p > 0 else np.inf
            core = np.where(x >= 1, edge, core)
        return 2.0 * np.pi * big**mu * core / x


def _kernel_offset(mu, r, d, N, quad, method="auto"):
    """``k_mu(r, r + d)`` with the offset ``d`` kept exact (near-diagonal use)."""
    r = np.asarray(r, dtype=float)
    d = np.asarray(d, dtype=float)
    s = r + d
    big = np.maximum(r, s)
    small = np.minimum(r, s)
    out = np.empty(r.shape)
    origin = small == 0
    out[origin] = sphere_area(N) * big[origin] ** mu
    rest = ~origin
    if N == 1:
        out[rest] = np.abs(d[rest]) ** mu + (r[rest] + s[rest]) ** mu
    elif N == 3 and method == "auto":
        b, x, gap = big[rest], small[rest] / big[rest], np.abs(d[rest]) / big[rest]
        p = mu + 2.0
        # log(1 - x) from the exact gap once x is not small
        with np.errstate(divide="ignore"):
            lm = np.where(x < 0.5, np.log1p(-np.minimum(x, 0.5)), np.log(gap))
        if p == 0.0:
            core = np.log1p(x) - lm
        else:
            core = np.exp(p * lm) * np.expm1(p * (np.log1p(x) - lm)) / p
        out[rest] = 2.0 * np.pi * b**mu * core / x
    else:
        out[rest] = _theta_integral(mu, r[rest], s[rest], d[rest], N, quad)
    return out


def sphere_kernel(mu, r, s, N: int, quad: QuadratureSpec = DEFAULT_QUAD, method: str = "auto"):
    """``int_{S^{N-1}} |r e - s w|^mu dw``; broadcasts over ``r`` and ``s``.

    ``method`` is ``"auto"`` (closed forms where available) or ``"quadrature"``.
    """
    mu = float(mu)
    r_arr, s_arr = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr).ravel()
    s_arr = np.atleast_1d(s_arr).ravel()
    if np.any(r_arr < 0) or np.any(s_arr < 0):
        raise DomainError("radii must be nonnegative")
    diag = r_arr == s_arr
    if mu < 0:
        bad = diag & ((r_arr == 0) | (mu <= -(N - 1)))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DivergentIntegralError(
                f"sphere kernel diverges for mu={mu} at r=s={r_arr[i]} in N={N}"
            )
    out = np.empty(r_arr.shape)
    big = np.maximum(r_arr, s_arr)
    small = np.minimum(r_arr, s_arr)
    origin = small == 0
    with np.errstate(divide="ignore"):
        out[origin] = sphere_area(N) * big[origin] ** mu if mu != 0 else sphere_area(N)
    rest = ~origin
    if np.any(rest):
        rr, ss = r_arr[rest], s_arr[rest]
        if N == 1:
            out[rest] = np.abs(rr - ss) ** mu + (rr + ss) ** mu
        elif N == 3 and method == "auto":
            out[rest] = _kernel_n3(mu, big[rest], small[rest] / big[rest])
        elif method in ("auto", "quadrature"):
            out[rest] = _theta_integral(mu, rr, ss, rr - ss, N, quad)
        else:
            raise ValueError(f"unknown method {method!r}")
    if scalar:
        return float(out[0])
    return out.reshape(np.broadcast(np.asarray(r), np.asarray(s)).shape)


# ---------------------------------------------------------------------------
# ball potentials


def _check_mu(mu, N):
    if mu <= -N:
        raise NonIntegrableError(f"|x|^{mu} is not locally integrable in dimension {N}")


def _phi_n1(mu, r):
    q = mu + 1.0
    return ((r + 1.0) ** q + np.sign(1.0 - r) * np.abs(1.0 - r) ** q) / q


def _phi_n3(mu, r):
    p = mu + 2.0
    u = np.abs(1.0 - r)
    sg = np.sign(1.0 - r)
    f_plus = (
        (r + 1.0) ** (p + 2) / (p + 2)
        - r * (r + 1.0) ** (p + 1) / (p + 1)
        - r ** (p + 2) / (p + 2)
        + r ** (p + 2) / (p + 1)
    )
    with np.errstate(divide="ignore"):
        f_minus = r * (r ** (p + 1) + sg * u ** (p + 1)) / (p + 1) + (u ** (p + 2) - r ** (p + 2)) / (p + 2)
    return 2.0 * np.pi / (p * r) * (f_plus - f_minus)


def _phi_quadrature(mu, r, N, quad, radius, kernel_method):
    beta = mu + N - 1
    L = max(quad.diagonal_refinement_levels // 2,
            levels_for_exponent(beta, quad.rel_tol, cap=quad.diagonal_refinement_levels + 200))
    n = quad.nodes_per_cell
    out = np.empty(r.shape)
    for k, rk in enumerate(r):
        if rk < 1e-8 * radius:
            # phi is even and smooth at the origin: phi(r) = phi(0) + O(r^2)
            out[k] = sphere_area(N) * radius ** (N + mu) / (N + mu)
            continue
        # nodes as exact offsets from rk so none of them rounds onto s = rk
        u, wu = graded_offsets(L, n)
        if rk < radius:
            d = np.concatenate([-rk * u, (radius - rk) * u])
            ws = np.concatenate([rk * wu, (radius - rk) * wu])
            xs = np.concatenate([rk - rk * u, rk + (radius - rk) * u])
        else:
            d = (radius - rk) - radius * u
            ws = radius * wu
            xs = radius - radius * u
        ws = ws * xs ** (N - 1)
        kv = _kernel_offset(mu, np.full(d.shape, rk), d, N, quad, method=kernel_method)
        out[k] = ws @ kv
    return out


def ball_potential(
    mu,
    r,
    N: int,
    quad: QuadratureSpec = DEFAULT_QUAD,
    radius: float = 1.0,
    method: str = "auto",
):
    """``int_{|y| < radius} |x - y|^mu dy`` at ``|x| = r``.

    ``method="quadrature"`` skips the closed forms; ``radius != 1`` always
    integrates directly (no rescaling).
    """
    mu = float(mu)
    _check_mu(mu, N)
    r_arr = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
    if np.any(r_arr < 0):
        raise DomainError("r must be nonnegative")
    out = np.empty(r_arr.shape)
    todo = np.ones(r_arr.shape, dtype=bool)
    if method == "auto" and radius == 1.0:
        at0 = r_arr == 0
        out[at0] = sphere_area(N) / (N + mu)
        todo &= ~at0
        if N == 1:
            out[todo] = _phi_n1(mu, r_arr[todo])
            todo[:] = False
        elif N == 3 and mu != -2.0:
            lo, hi = _N3_CLOSED_WINDOW
            sel = todo & (r_arr >= lo) & (r_arr <= hi)
            out[sel] = _phi_n3(mu, r_arr[sel])
            todo &= ~sel
    elif method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if np.any(todo):
        km = "quadrature" if method == "quadrature" else "auto"
        out[todo] = _phi_quadrature(mu, r_arr[todo], N, quad, float(radius), km)
    if np.ndim(r) == 0:
        return float(out[0])
    return out.reshape(np.shape(r))


def _dphi_n3(mu, r, u):
    """Closed-form ``phi_mu'`` in N = 3 with ``u = r - 1`` supplied separately."""
    p = mu + 2.0
    au = np.abs(u)
    with np.errstate(divide="ignore"):
        a = (r * r + 1.0) * ((r + 1.0) ** p - au**p) / (0.5 * p)
        b = ((r + 1.0) ** (p + 2) - au ** (p + 2)) / (0.5 * p + 1.0)
    return -2.0 * np.pi / (4.0 * r * r) * (a - b)


def _dphi_generic(mu, r, u, N, quad, method):
    out = np.empty(r.shape)
    todo = np.ones(r.shape, dtype=bool)
    zero = r == 0
    out[zero] = 0.0
    todo &= ~zero
    if N == 1:
        with np.errstate(divide="ignore"):
            out[todo] = (r[todo] + 1.0) ** mu - np.abs(u[todo]) ** mu
        return out
    if N == 3 and method == "auto" and mu != -2.0:
        lo, hi = _N3_CLOSED_WINDOW
        sel = todo & (r >= lo) & (r <= hi)
        out[sel] = _dphi_n3(mu, r[sel], u[sel])
        todo &= ~sel
    if np.any(todo):
        ones = np.ones(int(todo.sum()))
        out[todo] = -_theta_integral(mu, r[todo], ones, u[todo], N, quad, with_cos=True)
    return out


def ball_potential_derivative(
    mu,
    r,
    N: int,
    quad: QuadratureSpec = DEFAULT_QUAD,
    method: str = "auto",
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
):
    """``d/dr phi_mu(r)`` from the surface-integral (Gauss theorem) formula.

    Raises :class:`SurfaceDivergence` (``sign = -1``) when ``mu <= -(N-1)`` and
    ``|r - 1| < divergence_threshold``.
    """
    mu = float(mu)
    _check_mu(mu, N)
    r_arr = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
    if np.any(r_arr < 0):
        raise DomainError("r must be nonnegative")
    u = r_arr - 1.0
    if mu <= -(N - 1):
        near = np.abs(u) < divergence_threshold
        if np.any(near):
            i = int(np.argmax(near))
            raise SurfaceDivergence(
                f"phi'_{mu} diverges to -inf at the unit sphere (|r-1| = {abs(u[i]):.3g})",
                sign=-1,
                distance=float(abs(u[i])),
            )
    out = _dphi_generic(mu, r_arr, u, N, quad, method)
    if np.ndim(r) == 0:
        return float(out[0])
    return out.reshape(np.shape(r))


def ball_potential_derivative_offset(mu, v, N: int, quad: QuadratureSpec = DEFAULT_QUAD):
    """``phi_mu'(1 + v)`` with the offset ``v`` kept exact (no divergence guard).

    Offsets far below machine epsilon are resolved, which is what the surface
    blow-up analysis needs.
    """
    mu = float(mu)
    _check_mu(mu, N)
    v_arr = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
    if mu <= -(N - 1) and np.any(v_arr == 0):
        raise SurfaceDivergence(f"phi'_{mu} is infinite at r = 1", sign=-1, distance=0.0)
    out = _dphi_generic(mu, 1.0 + v_arr, v_arr, N, quad, "auto")
    if np.ndim(v) == 0:
        return float(out[0])
    return out.reshape(np.shape(v))


def combined_ball_potential(
    params: KernelParams,
    R: float,
    r,
    quad: QuadratureSpec = DEFAULT_QUAD,
    method: str = "scaled",
):
    """``Phi(r) = (|x|^alpha + |x|^-lambda) * 1_{B_R}`` at ``|x| = r``.

    ``method="scaled"`` rescales unit-ball potentials; ``"direct"`` integrates
    over the radius-``R`` ball.
    """
    if not R > 0:
        raise DomainError("R must be positive")
    N, a, lam = params.N, params.alpha, params.lam
    r = np.asarray(r, dtype=float)
    if method == "scaled":
        x = r / R
        val = R ** (N + a) * ball_potential(a, x, N, quad) + R ** (N - lam) * ball_potential(-lam, x, N, quad)
    elif method == "direct":
        val = ball_potential(a, r, N, quad, radius=R, method="quadrature") + ball_potential(
            -lam, r, N, quad, radius=R, method="quadrature"
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(val) if np.ndim(val) == 0 else val


def combined_ball_potential_derivative(params: KernelParams, R: float, r, quad: QuadratureSpec = DEFAULT_QUAD):
    N, a, lam = params.N, params.alpha, params.lam
    x = np.asarray(r, dtype=float) / R
    val = R ** (N + a - 1) * ball_potential_derivative(a, x, N, quad) + R ** (
        N - lam - 1
    ) * ball_potential_derivative(-lam, x, N, quad)
    return float(val) if np.ndim(val) == 0 else val


def combined_potential_increment(params: KernelParams, R: float, v: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``Phi(R (1 + v)) - Phi(R)`` by integrating ``Phi'`` over the offset.

    Stays accurate for ``|v|`` far below machine epsilon, where differencing
    ``Phi`` values cannot resolve anything.
    """
    if v == 0:
        return 0.0
    N, a, lam = params.N, params.alpha, params.lam
    beta = min(0.0, N - 1 - lam)
    L = levels_for_exponent(beta, quad.rel_tol, cap=quad.diagonal_refinement_levels + 200)
    t, w = graded_offsets(L, quad.nodes_per_cell)
    t = v * t
    w = abs(v) * w
    g = ball_potential_derivative_offset(a, t, N, quad) + R ** (-a - lam) * ball_potential_derivative_offset(
        -lam, t, N, quad
    )
    return float(math.copysign(1.0, v) * R ** (N + a) * (w @ g))


# ---------------------------------------------------------------------------
# kernel matrices


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Cell-pair averages of ``|S^{N-1}| r^{N-1} s^{N-1} k_mu(r, s)``.

    ``weighted[i, j]`` is the double integral over cells ``i`` and ``j``;
    ``avg = weighted / (vol_i vol_j)`` is the cell-pair average of the kernel
    ``|x - y|^mu``.
    """

    mu: float
    N: int
    grid: Any
    weighted: np.ndarray = field(repr=False)
    avg: np.ndarray = field(repr=False)
    backend: str = "python"

    @property
    def shape(self):
        return self.weighted.shape


def _tensor_gl(edges, n, kern, pairs_i, pairs_j, chunk=1 << 20):
    """Tensor Gauss-Legendre double integral of ``kern(r, s)`` over cell pairs."""
    R, W = cell_nodes(edges, n)
    out = np.empty(pairs_i.shape[0])
    step = max(1, chunk // (n * n))
    for lo in range(0, pairs_i.shape[0], step):
        ii = pairs_i[lo : lo + step]
        jj = pairs_j[lo : lo + step]
        rr = np.broadcast_to(R[ii][:, :, None], (ii.size, n, n))
        ss = np.broadcast_to(R[jj][:, None, :], (ii.size, n, n))
        vals = kern(rr.ravel(), ss.ravel()).reshape(ii.size, n, n)
        out[lo : lo + step] = np.einsum("pa,pab,pb->p", W[ii], vals, W[jj])
    return out


def _near_pair(a1, b1, a2, b2, integrand, n, levels):
    """Integral over ``[a1,b1] x [a2,b2]`` (``a2 >= a1``) in ``(w = s - r, r)`` coordinates."""
    gx, gw = gauss_legendre(n)
    if a1 == a2 and b1 == b2:
        ws, ww = graded_rule(0.0, b1 - a1, levels, n, "left")
        lo = np.full(ws.shape, a1)
        hi = b1 - ws
        pieces = [(ws, ww, lo, hi, 2.0)]
    else:
        bps = sorted({a2 - b1, a2 - a1, b2 - b1, b2 - a1})
        pieces = []
        for w0, w1 in zip(bps[:-1], bps[1:]):
            if w1 <= w0:
                continue
            ws, ww = graded_rule(w0, w1, levels, n, "left")
            lo = np.maximum(a1, a2 - ws)
            hi = np.minimum(b1, b2 - ws)
            pieces.append((ws, ww, lo, hi, 1.0))
    total = 0.0
    for ws, ww, lo, hi, factor in pieces:
        span = np.maximum(hi - lo, 0.0)
        rr = lo[:, None] + span[:, None] * gx[None, :]
        wr = (ww * span)[:, None] * gw[None, :]
        ss = rr + ws[:, None]
        dd = np.broadcast_to(ws[:, None], rr.shape)
        total += factor * float(np.sum(wr * integrand(rr.ravel(), ss.ravel(), dd.ravel()).reshape(rr.shape)))
    return total


def _near_mask(edges):
    lo, hi = edges[:-1], edges[1:]
    h = hi - lo
    iu, ju = np.triu_indices(lo.size)
    hmax = np.maximum(h[iu], h[ju])
    near = (lo[ju] - hi[iu]) <= 2.0 * hmax
    return iu, ju, near


def _assemble_n1(edges, mu, quad):
    n = quad.nodes_per_cell
    iu, ju, near = _near_mask(edges)
    W = np.zeros((edges.size - 1,) * 2)

    def kern(r, s):
        with np.errstate(divide="ignore"):
            return 2.0 * (np.abs(r - s) ** mu + (r + s) ** mu)

    far_vals = _tensor_gl(edges, n, kern, iu[~near], ju[~near])
    W[iu[~near], ju[~near]] = far_vals
    q = mu + 1.0

    def g_abs(r, s):
        return np.abs(r - s) ** (mu + 2) / (q * (mu + 2))

    def g_sum(r, s):
        return (r + s) ** (mu + 2) / (q * (mu + 2))

    i, j = iu[near], ju[near]
    a1, b1, a2, b2 = edges[i], edges[i + 1], edges[j], edges[j + 1]

    def rect(g):
        return g(b1, b2) - g(a1, b2) - g(b1, a2) + g(a1, a2)

    W[i, j] = 2.0 * (-rect(g_abs) + rect(g_sum))
    W[ju, iu] = W[iu, ju]
    return W


def _assemble_general(edges, mu, N, quad):
    n = quad.nodes_per_cell
    area = sphere_area(N)
    iu, ju, near = _near_mask(edges)
    levels = max(quad.diagonal_refinement_levels, levels_for_exponent(mu + N - 1, quad.rel_tol))

    def integrand(r, s, d=None):
        if d is None:
            return area * (r * s) ** (N - 1) * sphere_kernel(mu, r, s, N, quad)
        return area * (r * s) ** (N - 1) * _kernel_offset(mu, r, d, N, quad)

    W = np.zeros((edges.size - 1,) * 2)
    W[iu[~near], ju[~near]] = _tensor_gl(edges, n, integrand, iu[~near], ju[~near])
    for i, j in zip(iu[near], ju[near]):
        W[i, j] = _near_pair(edges[i], edges[i + 1], edges[j], edges[j + 1], integrand, n, levels)
    W[ju, iu] = W[iu, ju]
    return W


def _pairs_to_check(edges):
    """A few representative cell pairs: origin, middle and outer cells."""
    M = edges.size - 1
    picks = []
    for i in sorted({0, M // 2, M - 1}):
        for j in (i, i + 1, i + 3):
            if j < M:
                picks.append((i, j))
    return picks


def _check_tolerance(W, edges, mu, N, quad):
    """Compare selected entries against an independent higher-order evaluation."""
    fine = QuadratureSpec(
        nodes_per_cell=quad.nodes_per_cell + 4,
        diagonal_refinement_levels=quad.diagonal_refinement_levels + 8,
        abs_tol=quad.abs_tol,
        rel_tol=quad.rel_tol,
        angular_nodes=quad.angular_nodes + 4,
        angular_margin=quad.angular_margin + 2,
    )
    area = sphere_area(N)
    levels = max(fine.diagonal_refinement_levels, levels_for_exponent(mu + N - 1, fine.rel_tol * 1e-2))

    def integrand(r, s, d):
        if N == 1:
            with np.errstate(divide="ignore"):
                return 2.0 * (np.abs(d) ** mu + (r + s) ** mu)
        return area * (r * s) ** (N - 1) * _kernel_offset(mu, r, d, N, fine)

    worst, worst_err = None, 0.0
    for i, j in _pairs_to_check(edges):
        ref = _near_pair(edges[i], edges[i + 1], edges[j], edges[j + 1], integrand, fine.nodes_per_cell, levels)
        err = abs(W[i, j] - ref) / max(abs(ref), 1e-300)
        if err > worst_err:
            worst, worst_err = (i, j), err
    if worst_err > CHECK_REL_TOL:
        raise ToleranceNotMet(
            f"kernel matrix entry {worst} off by relative {worst_err:.2e} (mu={mu}, N={N})",
            worst=worst,
            error=worst_err,
        )
    return worst, worst_err


CHECK_REL_TOL = 1e-7
_CACHE: dict = {}
_CACHE_SIZE = 24


def kernel_matrix(
    grid,
    mu: float,
    N: int | None = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
    backend: str | None = None,
    check: bool = True,
) -> KernelMatrix:
    """Assemble (or fetch from cache) the cell-pair kernel matrix on ``grid``."""
    from .errors import GridMismatch

    N = grid.N if N is None else int(N)
    if N != grid.N:
        raise GridMismatch(f"grid is {grid.N}-dimensional, kernel requested for N={N}")
    mu = float(mu)
    _check_mu(mu, N)
    be = _backend.get_backend(backend)
    be_name = "cython" if be is not _backend._kernels_py else "python"
    key = (grid.key, mu, N, quad, be_name)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    edges = np.asarray(grid.edges, dtype=float)
    if N == 3:
        gx, gw = gauss_legendre(quad.nodes_per_cell)
        W = be.assemble_n3(edges, mu, gx, gw)
    elif N == 1:
        W = _assemble_n1(edges, mu, quad)
    else:
        W = _assemble_general(edges, mu, N, quad)
    if check:
        _check_tolerance(W, edges, mu, N, quad)
    vol = grid.volumes
    avg = W / np.outer(vol, vol)
    W.setflags(write=False)
    avg.setflags(write=False)
    K = KernelMatrix(mu=mu, N=N, grid=grid, weighted=W, avg=avg, backend=be_name)
    if len(_CACHE) >= _CACHE_SIZE:
        _CACHE.pop(next(iter(_CACHE)))
    _CACHE[key] = K
    return K


def clear_cache() -> None:
    _CACHE.clear()
