import numpy as np
import pytest
from numpy.testing import assert_allclose

from flockball import KernelParams, RadialGrid, SolverOptions, asymmetry, make_profile, minimize
from flockball.density import bathtub_fill
from flockball.energy import matrices_for, total_energy
from flockball.errors import DomainError, InfeasibleMass, RegimeError, ZeroMassError
from flockball.geometry import ball_volume
from flockball.radial_kernel import combined_ball_potential
from flockball.solver import el_residual, el_residual_from_potential, initial_profile


@pytest.fixture(scope="module")
def grid4():
    # R = 4 on a cell edge
    return RadialGrid.uniform(10.0, 256, 3)


@pytest.fixture(scope="module")
def run4(params, grid4):
    return minimize(params, ball_volume(4.0, 3), grid4, SolverOptions(init="annulus"))


def test_converges_to_ball(params, grid4, run4):
    assert run4.converged
    assert run4.residuals[-1] <= 1e-6
    assert run4.energy_monotone()
    A, _ = asymmetry(run4.profile)
    assert A <= 2 * grid4.max_width / 4.0


def test_iterates_admissible(run4):
    v = run4.profile.values
    assert v.min() >= 0.0 and v.max() <= 1.0
    assert_allclose(run4.profile.mass, ball_volume(4.0, 3), rtol=1e-12)


def test_minimizer_not_worse_than_ball(params, grid4, run4):
    Ka, Kr = matrices_for(params, grid4)
    ball = make_profile("ball", grid4, R=4.0)
    e_ball = total_energy(ball, params, Ka, Kr).total
    # the unnormalized residual res * m * |mu| bounds the remaining descent
    slack = run4.residuals[-1] * run4.profile.mass * abs(run4.multipliers[-1])
    assert run4.breakdown.total <= e_ball + slack * (1 + 1e-6) + 1e-12 * e_ball


def test_polish_reaches_ball(params, grid4):
    rep = minimize(params, ball_volume(4.0, 3), grid4, SolverOptions(polish=True))
    assert rep.converged and rep.residuals[-1] == 0.0
    assert rep.profile.l1_distance(make_profile("ball", grid4, R=4.0)) < 1e-12


def test_ball_init_is_fixed_point(params, grid4):
    rep = minimize(params, ball_volume(4.0, 3), grid4, SolverOptions(init="ball"))
    assert rep.converged
    assert rep.iterations == 0


def test_init_independence(params):
    g = RadialGrid.uniform(20.0, 512, 3)
    m = ball_volume(8.0, 3)
    a = minimize(params, m, g, SolverOptions(init="annulus")).profile
    b = minimize(params, m, g, SolverOptions(init="uniform_slab")).profile
    assert a.l1_distance(b) <= 3 * g.volumes[g.cell_of(8.0)]


def test_projected_gradient_fallback(params):
    g = RadialGrid.uniform(5.0, 128, 3)
    rep = minimize(params, ball_volume(2.0, 3), g, SolverOptions(method="projected_gradient", max_iters=400))
    assert rep.converged
    assert rep.energy_monotone()
    assert_allclose(rep.profile.mass, ball_volume(2.0, 3), rtol=1e-10)


def test_fixed_point_residual(params, grid4, run4):
    Ka, Kr = matrices_for(params, grid4)
    res, mu = el_residual(run4.profile, params, Ka, Kr)
    assert res <= 1e-6


def test_residual_zero_for_bathtub_output(grid4):
    psi = np.linspace(0, 1, grid4.M) ** 2
    prof, level = bathtub_fill(psi, 0.3 * grid4.capacity, grid4)
    res, mu = el_residual_from_potential(prof.values, psi, grid4.volumes)
    assert res == 0.0
    assert_allclose(mu, level)


def test_large_ball_satisfies_el(params):
    R = 10.0
    g = RadialGrid.uniform(25.0, 256, 3)
    Ka, Kr = matrices_for(params, g)
    res, mu = el_residual(make_profile("ball", g, R=R), params, Ka, Kr)
    assert res <= 1e-6
    # multiplier within a cell of the surface value
    assert_allclose(mu, combined_ball_potential(params, R, R), rtol=5e-3)


def test_ball_fails_el_in_singular_regime():
    p = KernelParams(3, 2.0, 2.5)
    res = []
    for cells in (128, 256, 512):
        g = RadialGrid.uniform(2.5, cells, 3)
        Ka, Kr = matrices_for(p, g)
        res.append(el_residual(make_profile("ball", g, R=1.0), p, Ka, Kr)[0])
    # no decay under refinement
    assert min(res) > 0.5
    assert res[-1] > 0.5 * res[0]


def test_errors(params, grid4):
    with pytest.raises(RegimeError):
        minimize(KernelParams(3, 2.0, 2.5), 1.0, grid4)
    with pytest.raises(ZeroMassError):
        minimize(params, 0.0, grid4)
    with pytest.raises(InfeasibleMass):
        minimize(params, 2 * grid4.capacity, grid4)
    with pytest.raises(DomainError):
        SolverOptions(tau=0.0)
    with pytest.raises(DomainError):
        SolverOptions(init="star")


def test_initial_profiles_have_mass(grid4):
    m = ball_volume(3.0, 3)
    for init in ("ball", "annulus", "uniform_slab"):
        prof = initial_profile(SolverOptions(init=init), m, grid4)
        assert_allclose(prof.mass, m, rtol=1e-12)


def test_max_iters_reported(params, grid4):
    rep = minimize(params, ball_volume(4.0, 3), grid4, SolverOptions(max_iters=1))
    assert not rep.converged
    assert rep.iterations == 1
    assert "maximum" in rep.message
