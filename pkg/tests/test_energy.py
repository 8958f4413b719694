import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from flockball import KernelParams, RadialGrid, RadialProfile, make_profile
from flockball.energy import (
    ball_interaction,
    interaction,
    matrices_for,
    potential_of_density,
    repulsive_psd_check,
    total_energy,
)
from flockball.errors import GridMismatch, RegimeError
from flockball.radial_kernel import kernel_matrix

from conftest import B_ANNULUS

PI = math.pi
BALL_ENERGY = 16 * PI**2 / 15  # I_2 and I_{-1} of the unit ball in N = 3
# radial-quadrature oracles for annulus(0.5, 1.125^{1/3}), N = 3
ANNULUS_I2 = 12.482002622548059
ANNULUS_IM1 = 9.745861479328365


@pytest.fixture(scope="module")
def edge_grid():
    return RadialGrid.uniform(2.0, 256, 3)


def test_ball_interaction_closed_values():
    assert_allclose(ball_interaction(2.0, 3), BALL_ENERGY, rtol=1e-10)
    assert_allclose(ball_interaction(-1.0, 3), BALL_ENERGY, rtol=1e-10)
    assert_allclose(ball_interaction(2.0, 3, R=2.0), 2.0**8 * BALL_ENERGY, rtol=1e-10)


def test_ball_energy_on_grid(params, edge_grid):
    Ka, Kr = matrices_for(params, edge_grid)
    ball = make_profile("ball", edge_grid, R=1.0)
    e = total_energy(ball, params, Ka, Kr)
    assert_allclose(e.attract, BALL_ENERGY, rtol=1e-9)
    assert_allclose(e.repel, BALL_ENERGY, rtol=1e-9)
    assert_allclose(e.total, 32 * PI**2 / 15, rtol=1e-9)
    assert_allclose(e.total, 21.055155, rtol=1e-7)


def test_zero_energy(params, edge_grid):
    Ka, Kr = matrices_for(params, edge_grid)
    zero = RadialProfile(edge_grid, np.zeros(edge_grid.M))
    assert total_energy(zero, params, Ka, Kr).total == 0.0


def test_energy_scaling(params):
    g1 = RadialGrid.uniform(2.5, 256, 3)
    for R in (0.5, 3.0):
        gR = g1.scaled(R)
        b1 = make_profile("ball", g1, R=1.0)
        bR = make_profile("ball", gR, R=R)
        e1 = total_energy(b1, params, *matrices_for(params, g1))
        eR = total_energy(bR, params, *matrices_for(params, gR))
        assert_allclose(eR.attract, R**8 * e1.attract, rtol=1e-6)
        assert_allclose(eR.repel, R**5 * e1.repel, rtol=1e-6)


def test_annulus_energies(params):
    g = RadialGrid.uniform(2.0, 256, 3).with_edges([0.5, B_ANNULUS])
    Ka, Kr = matrices_for(params, g)
    ann = make_profile("annulus", g, a=0.5, b=B_ANNULUS)
    assert_allclose(interaction(ann, ann, Ka), ANNULUS_I2, rtol=1e-9)
    assert_allclose(interaction(ann, ann, Kr), ANNULUS_IM1, rtol=1e-9)
    # equal mass: the ball is better for both parts
    assert ANNULUS_I2 > BALL_ENERGY > ANNULUS_IM1


def test_first_order_convergence_off_edge():
    # R = 1 inside a cell: error is driven by the one fractional cell
    errs = []
    for cells in (256, 512, 1024):
        g = RadialGrid.uniform(2.5, cells, 3)
        K = kernel_matrix(g, 2.0)
        ball = make_profile("ball", g, R=1.0)
        errs.append(abs(interaction(ball, ball, K) / BALL_ENERGY - 1))
    assert errs[1] < 1e-3
    assert errs[2] < errs[1] < errs[0]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bilinear_symmetric(seed):
    g = RadialGrid.uniform(2.0, 48, 3)
    K = kernel_matrix(g, -1.0)
    rng = np.random.default_rng(seed)
    f, h, k = rng.normal(size=(3, g.M))
    a, b = rng.normal(size=2)
    assert_allclose(interaction(f, h, K), interaction(h, f, K), rtol=1e-12)
    lhs = interaction(a * f + b * h, k, K)
    rhs = a * interaction(f, k, K) + b * interaction(h, k, K)
    assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * (abs(a) + abs(b)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_repulsive_form_positive(seed):
    g = RadialGrid.uniform(2.0, 48, 3)
    K = kernel_matrix(g, -1.0)
    eta = np.random.default_rng(seed).normal(size=g.M)
    l1 = np.abs(eta) @ g.volumes
    assert repulsive_psd_check(eta, K) >= -1e-6 * l1**2


def test_psd_examples(edge_grid):
    Kr = kernel_matrix(edge_grid, -1.0)
    g = edge_grid.with_edges([0.5, B_ANNULUS])
    Kr2 = kernel_matrix(g, -1.0)
    assert repulsive_psd_check(np.zeros(edge_grid.M), Kr) == 0.0
    ball = make_profile("ball", edge_grid, R=1.0)
    assert repulsive_psd_check(ball, Kr) > 0
    eta = make_profile("ball", g, R=1.0).values - make_profile("annulus", g, a=0.5, b=B_ANNULUS).values
    l1 = np.abs(eta) @ g.volumes
    assert repulsive_psd_check(eta, Kr2) >= -1e-6 * l1**2
    with pytest.raises(RegimeError):
        repulsive_psd_check(eta, kernel_matrix(g, 2.0))


def test_newtonian_potential_of_ball(edge_grid):
    K = kernel_matrix(edge_grid, -1.0)
    pot = potential_of_density(make_profile("ball", edge_grid, R=1.0), K)
    r = edge_grid.centers
    newton = np.where(r <= 1, 2 * PI * (1 - r * r / 3), 4 * PI / 3 / r)
    assert_allclose(pot, newton, rtol=1e-3)


def test_quadratic_potential_cell_averages(edge_grid):
    K = kernel_matrix(edge_grid, 2.0)
    pot = potential_of_density(make_profile("ball", edge_grid, R=1.0), K)
    a, b = edge_grid.edges[:-1], edge_grid.edges[1:]
    mean_r2 = 0.6 * (b**5 - a**5) / (b**3 - a**3)
    assert_allclose(pot, 4 * PI / 3 * (mean_r2 + 0.6), rtol=1e-9)


def test_riesz_ordering(params, edge_grid, rng):
    # among equal-mass profiles the ball maximizes I_{-lam} and minimizes I_alpha
    Ka, Kr = matrices_for(params, edge_grid)
    for _ in range(10):
        v = np.clip(rng.uniform(0, 1.2, edge_grid.M) * (edge_grid.centers < 1.6), 0, 1)
        rho = RadialProfile(edge_grid, v)
        from flockball import BallSpec

        R = BallSpec.from_mass(rho.mass, 3).R
        ref_a = ball_interaction(2.0, 3, R)
        ref_r = ball_interaction(-1.0, 3, R)
        assert interaction(rho, rho, Ka) >= ref_a * (1 - 1e-6)
        assert interaction(rho, rho, Kr) <= ref_r * (1 + 1e-6)


def test_mismatched_grid_rejected(params, edge_grid):
    Ka, Kr = matrices_for(params, edge_grid)
    other = make_profile("ball", RadialGrid.uniform(2.0, 100, 3), R=1.0)
    with pytest.raises(GridMismatch):
        interaction(other, other, Ka)
    with pytest.raises(RegimeError):
        total_energy(make_profile("ball", edge_grid, R=1.0), KernelParams(3, 1.0, 1.0), Ka, Kr)
