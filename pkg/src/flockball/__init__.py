"""Radial discretization of attractive-repulsive interaction energies."""
__version__ = "0.1.0"

from .density import BallSpec, RadialGrid, RadialProfile, asymmetry, bathtub_fill, competitor, make_profile
from .energy import EnergyBreakdown, interaction, matrices_for, potential_of_density, total_energy
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .radial_kernel import (
    KernelMatrix,
    KernelParams,
    ball_potential,
    ball_potential_derivative,
    combined_ball_potential,
    kernel_matrix,
    sphere_kernel,
)
from .solver import SolverOptions, SolverReport, minimize

__all__ = [
    "BallSpec",
    "DEFAULT_QUAD",
    "EnergyBreakdown",
    "KernelMatrix",
    "KernelParams",
    "QuadratureSpec",
    "RadialGrid",
    "RadialProfile",
    "SolverOptions",
    "SolverReport",
    "asymmetry",
    "ball_potential",
    "ball_potential_derivative",
    "bathtub_fill",
    "combined_ball_potential",
    "competitor",
    "interaction",
    "kernel_matrix",
    "make_profile",
    "matrices_for",
    "minimize",
    "potential_of_density",
    "sphere_kernel",
    "total_energy",
]
