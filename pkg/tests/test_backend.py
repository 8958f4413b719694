import numpy as np
import pytest
from numpy.testing import assert_allclose

from flockball import RadialGrid, _backend
from flockball.quadrature import gauss_legendre, theta_rule
from flockball.radial_kernel import kernel_matrix

needs_cython = pytest.mark.skipif("cython" not in _backend.available(), reason="extension not built")


def test_python_backend_always_available():
    assert "python" in _backend.available()
    with pytest.raises(ValueError):
        _backend.get_backend("fortran")


@needs_cython
@pytest.mark.parametrize("mu", [2.0, 0.5, -1.0, -2.0, -2.5])
def test_assemble_n3_backends_agree(mu):
    edges = np.linspace(0.0, 2.0, 49)
    gx, gw = gauss_legendre(6)
    a = _backend.get_backend("python").assemble_n3(edges, mu, gx, gw)
    b = _backend.get_backend("cython").assemble_n3(edges, mu, gx, gw)
    assert_allclose(a, b, rtol=1e-12)


@needs_cython
@pytest.mark.parametrize("N", [2, 4])
def test_theta_sum_backends_agree(N):
    rng = np.random.default_rng(3)
    r = rng.uniform(0.1, 2, 50)
    s = rng.uniform(0.1, 2, 50)
    th, wt = theta_rule(12, 8)
    for with_cos in (False, True):
        a = _backend.get_backend("python").theta_sum(-1.3, r, s, r - s, N, th, wt, with_cos)
        b = _backend.get_backend("cython").theta_sum(-1.3, r, s, r - s, N, th, wt, with_cos)
        assert_allclose(a, b, rtol=1e-12)


def test_kernel_matrix_backend_choice():
    grid = RadialGrid.uniform(1.0, 16, 3)
    K = kernel_matrix(grid, -1.0, backend="python")
    assert K.backend == "python"
    assert kernel_matrix(grid, -1.0, backend="python") is K
