import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.analysis.bounds import (BianalyticTestFn, SubharmonicRadialPsi, bound_dbar_origin, bound_dbar_rescaled,
                                 bound_value_origin, bound_value_origin_neg, bound_value_rescaled,
                                 check_lemma1, check_submean_holomorphic, disk_integral, green_potential_origin,
                                 kernel_diag_bound, run_bounds_harness, sup_laplacian)
from src.analysis.closedform import gaussian_poly_kernel
from src.models.errors import ErrorCode, NumericalError, ValidationError
from src.models.potential import HermitianPotential

seeds = st.integers(0, 2 ** 32 - 1)


def test_disk_integral_of_polynomial():
    assert disk_integral(lambda z: np.abs(z) ** 2) == pytest.approx(np.pi / 2)
    assert disk_integral(lambda z: np.ones(np.shape(z)), center=0.5, radius=0.1) == pytest.approx(np.pi * 0.01)


def test_green_potential_values():
    assert green_potential_origin(lambda rho: np.ones_like(rho)) == pytest.approx(-1.0, abs=1e-9)
    psi = SubharmonicRadialPsi(a=0.7, b=0.4)
    assert green_potential_origin(psi.laplacian) == pytest.approx(-1.1, abs=1e-9)


def test_green_potential_divergent_density():
    with pytest.raises(NumericalError) as info:
        green_potential_origin(lambda rho: 1.0 / rho ** 4, max_doublings=2)
    assert info.value.code is ErrorCode.DIVERGENT


def test_psi_family_validation():
    with pytest.raises(ValidationError):
        SubharmonicRadialPsi(a=-1.0)
    psi = SubharmonicRadialPsi(a=1.0, b=0.5, const=-2.0)
    assert psi.check_subharmonic()
    assert psi.is_nonpositive()
    assert psi.laplacian(0.5) == pytest.approx(1.5)


def test_test_function_dbar():
    u = BianalyticTestFn(u1=(1.0,), u2=(2.0, 1j), c=0.5)
    z = 0.3 - 0.2j
    expected = 0.5 + z * (2.0 + 1j * z)
    assert u.dbar(z) == pytest.approx(expected)
    assert u(0j) == pytest.approx(1.0)


@given(seeds)
def test_unit_disk_bounds_hold(seed):
    rng = np.random.default_rng(seed)
    u = BianalyticTestFn.random(rng)
    holo = BianalyticTestFn.random(rng, holomorphic=True)
    psi = SubharmonicRadialPsi.random(rng)
    psi_neg = SubharmonicRadialPsi.random(rng, nonpositive=True)
    for lhs, rhs in (check_submean_holomorphic(holo, psi), check_lemma1(u, psi), bound_dbar_origin(u, psi),
                     bound_value_origin_neg(u, psi_neg), bound_value_origin(u, psi)):
        assert lhs <= rhs * (1 + 1e-8)


def test_negative_bound_requires_nonpositive_psi():
    with pytest.raises(ValidationError) as info:
        bound_value_origin_neg(BianalyticTestFn(u1=(1.0,)), SubharmonicRadialPsi(a=1.0, const=0.5))
    assert info.value.code is ErrorCode.PSI_NOT_NONPOSITIVE


def test_submean_rejects_non_holomorphic():
    with pytest.raises(ValidationError):
        check_submean_holomorphic(BianalyticTestFn(c=1.0), SubharmonicRadialPsi())


def test_sup_laplacian_of_quartic():
    P = HermitianPotential.quartic(0.1)
    assert sup_laplacian(P, 0j, 0.5) == pytest.approx(1.0 + 0.4 * 0.25)


@given(seeds)
def test_rescaled_bounds_hold(seed):
    rng = np.random.default_rng(seed)
    P = HermitianPotential.quartic(float(rng.uniform(0.0, 0.2)))
    m = float(rng.uniform(1.0, 30.0))
    delta = float(rng.uniform(0.3, 1.0))
    u = BianalyticTestFn.random(rng, 3)
    value = bound_value_rescaled(u, P, m, delta)
    assert value['lhs'] <= value['rhs_primary'] * (1 + 1e-8)
    assert value['rhs_primary'] <= value['rhs_secondary']
    dbar = bound_dbar_rescaled(u, P, m, delta)
    assert dbar['lhs'] <= dbar['rhs_primary'] * (1 + 1e-8)


def test_gaussian_kernel_diagonal_bound():
    P = HermitianPotential.gaussian()
    for m in (1.0, 5.0, 20.0):
        diag = gaussian_poly_kernel(2, m, 0.2, 0.2).real
        assert diag <= kernel_diag_bound(P, m, 0.5, 0.2)


def test_harness_report():
    report = run_bounds_harness(trials=20, seed=7)
    assert report['trials'] == 20
    assert report['all_hold'], {k: v for k, v in report['checks'].items() if v['violations']}
    assert all(v['trials'] == 20 for v in report['checks'].values())


@pytest.mark.parametrize('m', [1.0, 10.0, 100.0])
def test_dbar_rescaled_conjugate_z(m):
    # u = z̄, Q = |z|², z0 = 0, δ = 1: |∂̄u|² = 1
    dbar = bound_dbar_rescaled(BianalyticTestFn(c=1.0), HermitianPotential.gaussian(), m, 1.0)
    assert dbar['lhs'] == pytest.approx(1.0)
    assert dbar['lhs'] <= dbar['rhs_primary']
    assert dbar['rhs_primary'] == pytest.approx(m * dbar['rhs_display'])


def test_dbar_display_constant_is_informational():
    report = run_bounds_harness(trials=50, seed=0)
    display = report['checks']['dbar_rescaled_display']
    assert display['informational']
    assert display['violations'] > 0
    assert report['checks']['dbar_rescaled']['violations'] == 0
    assert report['all_hold']
