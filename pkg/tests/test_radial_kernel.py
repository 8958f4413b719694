import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from flockball import KernelParams, RadialGrid
from flockball.errors import DivergentIntegralError, NonIntegrableError, RegimeError, SurfaceDivergence
from flockball.radial_kernel import (
    ball_potential,
    ball_potential_derivative,
    ball_potential_derivative_offset,
    combined_ball_potential,
    combined_ball_potential_derivative,
    combined_potential_increment,
    kernel_matrix,
    sphere_kernel,
)

PI = math.pi
radii = st.floats(0.05, 3.0)


# sphere kernel


def test_sphere_kernel_quadratic():
    assert_allclose(sphere_kernel(2.0, 1.0, 1.0, 3), 8 * PI, rtol=1e-12)


def test_sphere_kernel_shell_theorem():
    assert_allclose(sphere_kernel(-1.0, 0.5, 2.0, 3), 2 * PI, rtol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_sphere_kernel_origin(N):
    assert sphere_kernel(2.0, 0.0, 0.0, N) == 0.0


@given(radii, radii, st.sampled_from([-1.5, -0.5, 0.5, 2.0]))
def test_sphere_kernel_symmetric(r, s, mu):
    if abs(r - s) < 1e-6:
        return
    assert_allclose(sphere_kernel(mu, r, s, 3), sphere_kernel(mu, s, r, 3), rtol=1e-12)


@given(radii, radii, st.floats(0.2, 5.0), st.sampled_from([-1.0, 0.5, 2.0]))
def test_sphere_kernel_homogeneous(r, s, t, mu):
    if abs(r - s) < 1e-6:
        return
    assert_allclose(sphere_kernel(mu, t * r, t * s, 3), t**mu * sphere_kernel(mu, r, s, 3), rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(radii, radii, st.sampled_from([-1.7, -1.0, 0.5, 2.0, 3.3]))
def test_n3_closed_form_matches_quadrature(r, s, mu):
    if abs(r - s) < 1e-3:
        return
    closed = sphere_kernel(mu, r, s, 3)
    quad = sphere_kernel(mu, r, s, 3, method="quadrature")
    assert_allclose(closed, quad, rtol=1e-9)


@pytest.mark.parametrize("N", [2, 4, 5])
def test_quadratic_kernel_any_dimension(N):
    from flockball.geometry import sphere_area

    r, s = 0.7, 1.3
    assert_allclose(sphere_kernel(2.0, r, s, N), sphere_area(N) * (r * r + s * s), rtol=1e-10)


def test_sphere_kernel_diagonal_divergence():
    with pytest.raises(DivergentIntegralError):
        sphere_kernel(-2.5, 1.0, 1.0, 3)
    # integrable on the diagonal when mu > -(N-1)
    assert np.isfinite(sphere_kernel(-1.0, 1.0, 1.0, 3))


# ball potentials


@pytest.mark.parametrize(
    "mu,r,expected",
    [
        (-1.0, 2.0, 2 * PI / 3),
        (-1.0, 0.0, 2 * PI),
        (2.0, 0.0, 4 * PI / 5),
        (2.0, 1.0, 32 * PI / 15),
    ],
)
def test_ball_potential_examples(mu, r, expected):
    assert_allclose(ball_potential(mu, r, 3), expected, rtol=1e-10)


def newton(r):
    r = np.asarray(r, dtype=float)
    return np.where(r <= 1, 2 * PI * (1 - r * r / 3), (4 * PI / 3) / np.maximum(r, 1e-300))


def test_newtonian_profile():
    r = np.array([0.0, 0.5, 0.9, 1.0, 1.5, 3.0])
    assert_allclose(ball_potential(-1.0, r, 3), newton(r), rtol=1e-10)
    assert_allclose(ball_potential(-1.0, r, 3, method="quadrature"), newton(r), rtol=1e-8)


def test_quadratic_potential_profile():
    r = np.linspace(0, 3, 13)
    assert_allclose(ball_potential(2.0, r, 3), 4 * PI / 3 * (r * r + 0.6), rtol=1e-12)


@pytest.mark.parametrize("mu", [-2.5, -2.0, -1.0, 0.5, 2.0])
def test_closed_form_matches_quadrature_potential(mu):
    r = np.array([0.005, 0.3, 0.999, 1.0, 1.001, 2.0, 5.0])
    assert_allclose(ball_potential(mu, r, 3), ball_potential(mu, r, 3, method="quadrature"), rtol=1e-8)


def test_potential_other_dimensions():
    # N = 1: closed form of int_{-1}^{1} |r - y|^mu dy at r = 0
    assert_allclose(ball_potential(-0.5, 0.0, 1), 4.0, rtol=1e-12)
    # N = 2, mu = 2: |B_1| (r^2 + 1/2)
    assert_allclose(ball_potential(2.0, 0.5, 2), PI * (0.25 + 0.5), rtol=1e-9)


def test_radius_argument_matches_scaling():
    r = np.array([0.0, 0.5, 2.0])
    direct = ball_potential(-1.0, r, 3, radius=2.0)
    assert_allclose(direct, 2.0**2 * ball_potential(-1.0, r / 2.0, 3), rtol=1e-9)


@given(st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_repulsive_potential_decreasing(r1, r2):
    lo, hi = sorted((r1, r2))
    if hi - lo < 1e-6:
        return
    assert ball_potential(-1.0, lo, 3) > ball_potential(-1.0, hi, 3)


def test_non_integrable_power():
    with pytest.raises(NonIntegrableError):
        ball_potential(-3.0, 0.5, 3)


# derivatives


def test_derivative_examples():
    assert_allclose(ball_potential_derivative(-1.0, 2.0, 3), -PI / 3, rtol=1e-10)
    assert_allclose(ball_potential_derivative(2.0, 0.5, 3), 4 * PI / 3, rtol=1e-10)


@pytest.mark.parametrize("mu", [2.0, 0.5, -0.5, -1.0, -1.5])
def test_derivative_vs_finite_differences(mu):
    r = np.array([0.1, 0.4, 0.8, 1.2, 2.0])
    h = 1e-5
    fd = (ball_potential(mu, r + h, 3) - ball_potential(mu, r - h, 3)) / (2 * h)
    assert_allclose(ball_potential_derivative(mu, r, 3), fd, rtol=1e-6)


def test_derivative_quadrature_path():
    r = np.array([0.3, 0.9, 1.1, 2.0])
    assert_allclose(
        ball_potential_derivative(-1.5, r, 3, method="quadrature"),
        ball_potential_derivative(-1.5, r, 3),
        rtol=1e-8,
    )


def test_surface_blowup_singular_regime():
    lam = 2.5
    with pytest.raises(SurfaceDivergence) as exc:
        ball_potential_derivative(-lam, 1.0 + 1e-8, 3)
    assert exc.value.sign == -1
    # |phi'| grows like |r - 1|^{N-1-lam}
    v = np.array([1e-3, 1e-4, 1e-5])
    g = np.abs(ball_potential_derivative_offset(-lam, v, 3))
    slope = np.polyfit(np.log(v), np.log(g), 1)[0]
    assert_allclose(slope, 3 - 1 - lam, atol=0.05)
    assert g[0] >= 10**1.5


def test_surface_finite_bounded_regime():
    d = ball_potential_derivative(-1.0, np.array([1 - 1e-9, 1.0, 1 + 1e-9]), 3)
    assert_allclose(d, -4 * PI / 3, rtol=1e-6)


# combined potential


def test_combined_examples(params):
    assert_allclose(combined_ball_potential(params, 1.0, 0.0), 4 * PI / 5 + 2 * PI, rtol=1e-12)
    assert_allclose(combined_ball_potential(params, 1.0, 1.0), 32 * PI / 15 + 4 * PI / 3, rtol=1e-12)
    R = 2.0
    scaled = R**5 * (ball_potential(2.0, 0.0, 3) + R**-3 * ball_potential(-1.0, 0.0, 3))
    assert_allclose(combined_ball_potential(params, R, 0.0), scaled, rtol=1e-8)


def test_combined_direct_matches_scaled(params):
    r = np.array([0.0, 1.0, 3.0, 5.0])
    assert_allclose(
        combined_ball_potential(params, 3.0, r, method="direct"),
        combined_ball_potential(params, 3.0, r),
        rtol=1e-8,
    )


def test_increment_matches_difference(params):
    R = 4.0
    for v in (0.1, -0.1, 1e-3):
        diff = combined_ball_potential(params, R, R * (1 + v)) - combined_ball_potential(params, R, R)
        assert_allclose(combined_potential_increment(params, R, v), diff, rtol=1e-8)
    # below machine epsilon the increment is still linear in v
    inc = combined_potential_increment(params, R, 1e-20)
    slope = R * combined_ball_potential_derivative(params, R, R)
    assert_allclose(inc / 1e-20, slope, rtol=1e-6)


def test_kernel_params_validation():
    with pytest.raises(RegimeError):
        KernelParams(3, 2.0, 3.0)
    with pytest.raises(RegimeError):
        KernelParams(3, 0.0, 1.0)
    assert KernelParams(3, 2.0, 1.0).energy_regime
    assert not KernelParams(3, 2.0, 2.5).energy_regime
    p = KernelParams.from_mapping({"N": 3, "alpha": 2, "lambda": 1})
    assert p == KernelParams(3, 2.0, 1.0)


# kernel matrices


@pytest.mark.parametrize("mu", [2.0, -1.0, -2.5])
def test_kernel_matrix_symmetric_positive(mu):
    grid = RadialGrid.uniform(2.0, 64, 3)
    K = kernel_matrix(grid, mu)
    assert_allclose(K.weighted, K.weighted.T, rtol=1e-12)
    assert np.all(K.weighted > 0)


def test_kernel_matrix_row_sums_give_potential():
    # sum_j W_ij over a ball grid = int_{cell i} phi(|x|) dx
    grid = RadialGrid.uniform(1.0, 128, 3)
    K = kernel_matrix(grid, -1.0)
    pot = K.weighted.sum(axis=1) / grid.volumes
    r = grid.centers
    # cell average of 2 pi (1 - r^2 / 3) differs from the center value by O(h^2)
    assert_allclose(pot, newton(r), rtol=2e-4)


def test_kernel_matrix_n1_and_general():
    for N in (1, 2):
        grid = RadialGrid.uniform(1.0, 16, N)
        K = kernel_matrix(grid, 2.0, N)
        from flockball.geometry import ball_volume, sphere_area

        # quadratic kernel: sum W = 2 |B|^2 (N/(N+2)) for the unit ball
        m = ball_volume(1.0, N)
        second = sphere_area(N) / (N + 2)
        assert_allclose(K.weighted.sum(), 2 * m * second, rtol=1e-9)
