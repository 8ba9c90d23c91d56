import numpy as np
import pytest

from src.analysis.closedform import gaussian_poly_kernel
from src.analysis.expansion import (approx_kernel, blowup_error_study, blowup_lhs, coefficient_set,
                                    default_blowup_grid, eval_L1, eval_L2, fit_slope, initial_local_kernel,
                                    near_diagonal)
from src.analysis.sources import ApproxSource, GaussianSource
from src.models.errors import ErrorCode, NumericalError, ValidationError
from src.models.potential import HermitianPotential, laplacian


@pytest.mark.parametrize("q, k", [(1, 0), (1, 1), (1, 2), (2, 0), (2, 1)])
def test_gaussian_approximation_is_exact(q, k, gaussian, disk_points):
    m = 4.0
    z = disk_points(8, 0.5)
    w = disk_points(8, 0.5)
    got = approx_kernel(gaussian, m, q, k, z, w)
    assert np.allclose(got, gaussian_poly_kernel(q, m, z, w), rtol=1e-12, atol=1e-12)


def test_initial_local_kernel_for_gaussian(gaussian):
    m, z, w = 3.0, 0.1 + 0.2j, -0.2 + 0.1j
    assert initial_local_kernel(gaussian, m, 2, z, w) == pytest.approx(gaussian_poly_kernel(2, m, z, w), rel=1e-13)
    assert initial_local_kernel(gaussian, m, 1, z, w) == pytest.approx(gaussian_poly_kernel(1, m, z, w), rel=1e-13)


def test_leading_coefficients_on_diagonal(quartic):
    z = 0.3 + 0.1j
    assert eval_L1(quartic, z, z, 0) == pytest.approx(2 * laplacian(quartic, z) / np.pi)
    assert eval_L2(quartic, z, z, 0) == pytest.approx(0.0)
    assert eval_L2(quartic, z, z, 1) == pytest.approx(4 * laplacian(quartic, z) / np.pi)


def test_printed_and_solved_q1_sets_agree(quartic):
    printed = coefficient_set(1, 1, origin='printed')
    solved = coefficient_set(1, 1, origin='solved')
    z, w = 0.2, 0.1 - 0.1j
    assert printed.evaluate(1, quartic, z, w) == pytest.approx(solved.evaluate(1, quartic, z, w), rel=1e-12)


def test_unavailable_orders():
    with pytest.raises(ValidationError) as info:
        approx_kernel(HermitianPotential.gaussian(), 1.0, 2, 2, 0.0, 0.0)
    assert info.value.code is ErrorCode.ORDER_UNAVAILABLE
    with pytest.raises(ValidationError):
        coefficient_set(3)


def test_beta_zero_detected():
    P = HermitianPotential.from_terms({(2, 2): 1.0})
    with pytest.raises(NumericalError) as info:
        eval_L1(P, 0j, 0j, 1)
    assert info.value.code is ErrorCode.BETA_ZERO


def test_near_diagonal_mask(gaussian):
    mask = near_diagonal(gaussian, 8.0, np.zeros(2), np.array([0.1, 1.0]))
    assert mask.tolist() == [True, False]


def test_gaussian_blowup_is_exact(gaussian):
    grid = default_blowup_grid(2.0, 9)
    study = blowup_error_study(lambda m: GaussianSource(2, m), gaussian, 0.2 + 0.1j, grid, [4.0, 8.0, 16.0])
    assert max(study.errors) < 1e-10
    assert 'exact' in study.flags
    assert study.slope is None


def test_signed_blowup_for_gaussian(gaussian):
    xi = np.array([0j, 0.5])
    eta = np.array([1.0 + 1j, -0.5j])
    lhs = blowup_lhs(GaussianSource(2, 5.0), gaussian, 5.0, 0.1, xi, eta, signed=True)
    d2 = np.abs(xi - eta) ** 2
    assert np.allclose(lhs, (2 - d2) / np.pi * np.exp(-d2 / 2), atol=1e-12)


def test_single_m_flag(gaussian):
    study = blowup_error_study(lambda m: GaussianSource(2, m), gaussian, 0j, default_blowup_grid(1.0, 3), [4.0])
    assert 'single_m' in study.flags
    assert study.slope is None


def test_m_list_must_increase(gaussian):
    with pytest.raises(ValidationError):
        blowup_error_study(lambda m: GaussianSource(2, m), gaussian, 0j, default_blowup_grid(), [8.0, 4.0])


def test_fit_slope():
    ms = [10.0, 20.0, 40.0]
    assert fit_slope(ms, [1.0 / m for m in ms]) == pytest.approx(-1.0)
    assert fit_slope([1.0], [1.0]) is None
    assert fit_slope(ms, [1.0, 0.0, 1.0]) is None


@pytest.mark.slow
def test_quartic_blowup_error_decreases_with_approximation(quartic):
    grid = default_blowup_grid(2.0, 9)
    ms = [20.0, 40.0, 80.0, 160.0]
    study = blowup_error_study(lambda m: ApproxSource(quartic, m, 2, 1), quartic, 0.3, grid, ms)
    assert study.strictly_decreasing
    assert study.slope < -0.4


class _MeasuredSource:
    """Источник с заданными n и n_refinement_delta"""

    def __init__(self, inner, n, delta):
        self.inner = inner
        self.n = n
        self.n_refinement_delta = delta

    def eval(self, z, w):
        return self.inner.eval(z, w)


def test_blowup_rows_carry_refinement_and_flag_truncation(quartic):
    grid = default_blowup_grid(2.0, 9)
    deltas = {20.0: 1.0, 40.0: 1e-12}
    study = blowup_error_study(lambda m: _MeasuredSource(ApproxSource(quartic, m, 2, 1), 40, deltas[m]),
                               quartic, 0.3, grid, [20.0, 40.0])
    assert [r['n'] for r in study.rows] == [40, 40]
    assert [r['n_refinement_delta'] for r in study.rows] == [1.0, 1e-12]
    assert [r['truncation_ok'] for r in study.rows] == [False, True]
    assert 'truncation_dominated' in study.flags


def test_blowup_rows_without_refinement_measurement(gaussian):
    study = blowup_error_study(lambda m: GaussianSource(2, m), gaussian, 0j, default_blowup_grid(1.0, 3), [4.0, 8.0])
    assert all(r['n'] is None and r['truncation_ok'] is None for r in study.rows)
    assert 'truncation_dominated' not in study.flags
