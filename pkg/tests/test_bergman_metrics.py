import numpy as np
import pytest

from src.analysis.bergman_metrics import (approx_double_diagonal, metric1_density, metric2_density,
                                          poly_metric1_density, poly_metric1_matrix, poly_metric2,
                                          rescaled_first_limit, rescaled_metric_study, rescaled_second_limit)
from src.analysis.closedform import gaussian_poly_lift
from src.analysis.sources import GaussianSource, KoshelevSource
from src.models.errors import ErrorCode, NumericalError


def test_model_disk_first_and_second_metric():
    source = KoshelevSource(1)
    z = 0.4 + 0.2j
    r2 = abs(z) ** 2
    assert metric1_density(source.diag, source.weight, z) == pytest.approx(1.0 / (np.pi * (1 - r2) ** 2))
    assert metric2_density(source.diag, z, 1e-3) == pytest.approx(2.0 / (1 - r2) ** 2, rel=1e-6)


def test_polyanalytic_matrix_at_origin():
    source = KoshelevSource(2)
    A = poly_metric1_matrix(source.lift, source.weight, 2, 0j, method='interp')
    assert np.allclose(A, np.diag([4.0, 2.0]) / np.pi, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(A) > 0)


def test_stencil_matrix_agrees_with_interpolation():
    source = KoshelevSource(2)
    z = 0.2 - 0.1j
    interp = poly_metric1_matrix(source.lift, source.weight, 2, z, method='interp')
    stencil = poly_metric1_matrix(source.lift, source.weight, 2, z, h=1e-3, method='stencil')
    assert np.allclose(interp, stencil, atol=1e-5)


def test_polyanalytic_density_is_quadratic_form():
    source = KoshelevSource(2)
    eps = 0.5
    density = poly_metric1_density(source.lift, source.weight, 0j, eps)
    assert density == pytest.approx(4.5 / np.pi)
    A = poly_metric1_matrix(source.lift, source.weight, 2, 0j)
    v = np.array([1.0, eps])
    assert density == pytest.approx(float(np.real(v.conj() @ A @ v)))


def test_gaussian_rescaled_first_metric_is_exact(gaussian):
    study = rescaled_metric_study(lambda m: GaussianSource(2, m), gaussian, 0.3 + 0.1j,
                                  [0.5, 1.0 + 0.5j, -2j], [4.0, 16.0], second=False)
    assert max(study.column('first_error')) < 1e-10


def test_gaussian_rescaled_second_metric():
    m, z, eps_prime = 8.0, 0.1, 1.0 + 0.5j
    scale = np.sqrt(2 * m)
    source = GaussianSource(2, m)
    sample = poly_metric2(source.lift, z, eps_prime / scale, 1e-4 / scale)
    iso, dz2 = rescaled_second_limit(eps_prime)
    assert sample.isothermal / scale ** 2 == pytest.approx(iso, abs=1e-4)
    assert sample.dz2 / scale ** 2 == pytest.approx(dz2, abs=1e-4)


def test_rescaled_limits():
    assert rescaled_first_limit(0j) == pytest.approx(2 / np.pi)
    iso, dz2 = rescaled_second_limit(1j)
    assert iso == pytest.approx(1 + 4 / 9)
    assert dz2 == pytest.approx(-1 / 9)


def test_approx_density_for_gaussian(gaussian):
    m, z, eps = 6.0, 0.2 + 0.1j, 0.1 - 0.05j
    expected = np.real(gaussian_poly_lift(2, m, z, z + eps, z, z + eps)) * np.exp(-2 * m * abs(z) ** 2)
    assert approx_double_diagonal(gaussian, m, z, eps) == pytest.approx(expected, rel=1e-12)


def test_nonpositive_diagonal_rejected():
    with pytest.raises(NumericalError) as info:
        metric2_density(lambda p: -np.ones(np.shape(p)), 0.1, 1e-3)
    assert info.value.code is ErrorCode.NONPOSITIVE_DIAGONAL
