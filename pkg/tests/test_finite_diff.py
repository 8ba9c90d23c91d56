import numpy as np
import pytest

from src.utils.finite_diff import real_hessian, richardson, stencil_points, wirtinger_laplacian


def test_laplacian_of_modulus_squared():
    val, err = wirtinger_laplacian(lambda z: np.abs(z) ** 2, 0.3 + 0.2j, 1e-3)
    assert val == pytest.approx(1.0, abs=1e-8)
    assert err < 1e-6


def test_laplacian_of_quartic_with_extrapolation():
    # ∂∂̄|z|⁴ = 4|z|²
    z = 0.5 - 0.1j
    val, _ = wirtinger_laplacian(lambda p: np.abs(p) ** 4, z, 1e-2)
    assert val.real == pytest.approx(4 * abs(z) ** 2, rel=1e-8)


def test_hessian_of_quadratic_form():
    A = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, -0.3], [0.0, -0.3, 3.0]])
    H, _ = real_hessian(lambda pts: 0.5 * np.einsum('ni,ij,nj->n', pts, A, pts), np.array([0.1, -0.2, 0.3]), 1e-2)
    assert np.allclose(H, A, atol=1e-8)


def test_richardson_cancels_second_order_term():
    coarse, fine = 1.0 + 0.04, 1.0 + 0.01
    val, err = richardson(coarse, fine)
    assert val == pytest.approx(1.0)
    assert err == pytest.approx(0.03)


def test_stencil_points_cover_both_steps():
    pts = stencil_points(1j, 0.2)
    assert len(pts) == 9
    assert pts[0] == 1j
    assert 1j + 0.1 in pts
