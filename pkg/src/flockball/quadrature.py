"""Gauss-Legendre rules and dyadically graded composite rules.

All integrands handled in this package have endpoint singularities of known
power type, ``|x - x0|**beta`` with ``beta > -1``.  A composite rule made of
Gauss-Legendre panels on ``[2**-(k+1), 2**-k]`` (scaled to the interval)
integrates such functions with an error of order ``2**(-levels*(1+beta))``,
which is what :func:`levels_for_exponent` inverts.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs shared by every quadrature in the package.

    ``nodes_per_cell`` is the Gauss-Legendre order used per grid cell and per
    dyadic panel; ``diagonal_refinement_levels`` is the minimum number of dyadic
    panels used toward a singular point (more are added when the singularity
    exponent and ``rel_tol`` require it).  The angular rule of the sphere
    kernel is graded toward ``theta = 0`` down to the scale
    ``|r - s| / sqrt(r s)``, plus ``angular_margin`` extra levels.
    """

    nodes_per_cell: int = 6
    diagonal_refinement_levels: int = 24
    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    angular_nodes: int = 8
    angular_margin: int = 6

    def __post_init__(self):
        if self.nodes_per_cell < 1:
            raise ValueError("nodes_per_cell must be >= 1")
        if self.diagonal_refinement_levels < 0:
            raise ValueError("diagonal_refinement_levels must be >= 0")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.angular_nodes < 1 or self.angular_margin < 0:
            raise ValueError("angular rule needs at least one node")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(
            nodes_per_cell=self.nodes_per_cell * factor,
            diagonal_refinement_levels=self.diagonal_refinement_levels,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            angular_nodes=self.angular_nodes * factor,
            angular_margin=self.angular_margin,
        )


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def levels_for_exponent(beta: float, rel_tol: float, cap: int = 400) -> int:
    """Dyadic levels so that the untreated tail ``[0, 2**-L]`` is below rel_tol."""
    if beta <= -1:
        raise ValueError("singularity exponent must exceed -1")
    return min(cap, max(4, int(math.ceil(math.log2(1.0 / rel_tol) / (1.0 + beta))) + 2))


@lru_cache(maxsize=256)
def _graded_unit(levels: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    # panels [2^-(k+1), 2^-k] for k < levels, plus the tail [0, 2^-levels]
    x0, w0 = gauss_legendre(n)
    xs, ws = [], []
    for k in range(levels):
        lo, hi = 2.0 ** -(k + 1), 2.0 ** -k
        xs.append(lo + (hi - lo) * x0)
        ws.append((hi - lo) * w0)
    hi = 2.0 ** -levels
    xs.append(hi * x0)
    ws.append(hi * w0)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def graded_rule(a: float, b: float, levels: int, n: int, toward: str = "left"):
    """Composite rule on ``[a, b]`` refined dyadically toward one or both ends."""
    if toward == "both":
        mid = 0.5 * (a + b)
        xl, wl = graded_rule(a, mid, levels, n, "left")
        xr, wr = graded_rule(mid, b, levels, n, "right")
        return np.concatenate([xl, xr]), np.concatenate([wl, wr])
    u, w = _graded_unit(levels, n)
    h = b - a
    if toward == "left":
        return a + h * u, h * w
    if toward == "right":
        return b - h * u, h * w
    raise ValueError(f"unknown grading direction {toward!r}")


def graded_offsets(levels: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Graded rule on ``[0, 1]`` clustered at 0 (read-only arrays)."""
    return _graded_unit(levels, n)


@lru_cache(maxsize=64)
def theta_rule(levels: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on ``[0, pi]`` graded toward ``theta = 0``.

    Used for sphere averages after the substitution ``t = cos(theta)``, which
    turns the weight ``(1 - t**2)**((N-3)/2) dt`` into ``sin(theta)**(N-2)``.
    For ``N = 2`` this is the Chebyshev weight handled natively.
    """
    u, w = _graded_unit(levels, n)
    x = np.pi * u
    wt = np.pi * w
    x.setflags(write=False)
    wt.setflags(write=False)
    return x, wt


def cell_nodes(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell Gauss-Legendre nodes and weights, each of shape (M, n)."""
    x0, w0 = gauss_legendre(n)
    lo = edges[:-1, None]
    h = np.diff(edges)[:, None]
    return lo + h * x0[None, :], h * w0[None, :]
