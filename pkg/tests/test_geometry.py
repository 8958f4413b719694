import math

import numpy as np
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from flockball.geometry import ball_radius, ball_volume, shell_volumes, sphere_area


def test_sphere_areas():
    assert_allclose(sphere_area(1), 2.0)
    assert_allclose(sphere_area(2), 2 * math.pi)
    assert_allclose(sphere_area(3), 4 * math.pi)
    assert_allclose(sphere_area(4), 2 * math.pi**2)


def test_unit_ball_volume():
    assert_allclose(ball_volume(1.0, 3), 4 * math.pi / 3, rtol=1e-15)


@given(st.floats(1e-3, 1e3), st.integers(1, 8))
def test_radius_inverts_volume(R, N):
    assert_allclose(ball_radius(ball_volume(R, N), N), R, rtol=1e-12)


def test_thin_shell_no_cancellation():
    a = 1.0
    b = 1.0 + 1e-12
    # leading order |S^2| a^2 (b - a)
    assert_allclose(shell_volumes(a, b, 3), 4 * math.pi * (b - a), rtol=1e-11)


@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_shell_volume_is_ball_difference(a, b):
    lo, hi = min(a, b), max(a, b)
    expected = ball_volume(hi, 3) - ball_volume(lo, 3)
    assert_allclose(shell_volumes(lo, hi, 3), expected, rtol=1e-9, atol=1e-12)
    assert np.all(shell_volumes(lo, hi, 3) >= 0)
