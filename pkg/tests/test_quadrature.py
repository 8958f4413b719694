import numpy as np
import pytest
from numpy.testing import assert_allclose

from flockball.quadrature import (
    QuadratureSpec,
    gauss_legendre,
    graded_rule,
    levels_for_exponent,
    theta_rule,
)


@pytest.mark.parametrize("n", [1, 4, 8])
def test_gauss_legendre_exact_for_polynomials(n):
    x, w = gauss_legendre(n)
    for k in range(2 * n):
        assert_allclose(w @ x**k, 1.0 / (k + 1), rtol=1e-13)


@pytest.mark.parametrize("beta", [-0.5, -0.9, 0.3])
def test_graded_rule_endpoint_singularity(beta):
    L = levels_for_exponent(beta, 1e-10)
    x, w = graded_rule(0.0, 1.0, L, 8, "left")
    assert_allclose(w @ x**beta, 1.0 / (1.0 + beta), rtol=1e-8)


def test_graded_rule_both_ends():
    # untreated tails are O(2^{-L/2}); L stays small enough that no node rounds onto an end
    errs = []
    for L in (10, 20, 30):
        x, w = graded_rule(0.0, 2.0, L, 8, "both")
        errs.append(abs(w @ (x * (2.0 - x)) ** -0.5 - np.pi))
    assert errs[2] < 1e-5
    assert_allclose(np.log2(errs[0] / errs[2]) / 20, 0.5, atol=0.05)


def test_theta_rule_covers_half_circle():
    x, w = theta_rule(20, 8)
    assert_allclose(w.sum(), np.pi, rtol=1e-14)
    assert_allclose(w @ np.sin(x), 2.0, rtol=1e-12)


def test_levels_reject_nonintegrable():
    with pytest.raises(ValueError):
        levels_for_exponent(-1.0, 1e-8)


def test_spec_validation_and_refine():
    q = QuadratureSpec()
    r = q.refined(4)
    assert r.nodes_per_cell == 4 * q.nodes_per_cell
    assert r.angular_nodes == 4 * q.angular_nodes
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_per_cell=0)
