"""Sphere areas and radial volume elements in dimension N."""
from __future__ import annotations

import math

import numpy as np


def _area(N: int) -> float:
    return 2.0 * math.pi ** (0.5 * N) / math.gamma(0.5 * N)


_AREA_TABLE = tuple(_area(N) for N in range(1, 17))


def sphere_area(N: int) -> float:
    """Surface measure ``|S^{N-1}|`` of the unit sphere in R^N (``|S^0| = 2``)."""
    if N < 1:
        raise ValueError("dimension must be >= 1")
    if N <= 16:
        return _AREA_TABLE[N - 1]
    return _area(N)


def ball_volume(R: float, N: int) -> float:
    return sphere_area(N) * R**N / N


def ball_radius(mass: float, N: int) -> float:
    """Radius of the ball of volume ``mass``."""
    return (N * mass / sphere_area(N)) ** (1.0 / N)


def shell_volumes(a, b, N: int):
    """``|S^{N-1}| (b^N - a^N) / N`` without cancellation for thin shells."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    acc = np.zeros(np.broadcast(a, b).shape)
    for k in range(N):
        acc = acc + b**k * a ** (N - 1 - k)
    return sphere_area(N) * (b - a) * acc / N
