from fractions import Fraction

import numpy as np
import pytest

from src.analysis.closedform import gaussian_poly_kernel, koshelev_kernel, koshelev_lift
from src.analysis.gram import (BasisSpec, QuadratureSpec, choose_n, correlation_kernel, gram_kernel_build,
                               inner_products_disk_constant, inner_products_radial, n_refinement_delta)
from src.models.errors import ErrorCode, ValidationError
from src.models.potential import DomainSpec, HermitianPotential
from src.storage.gram_cache import GramCache

QUAD = QuadratureSpec(radial_nodes=128, max_doublings=4, rel_tol=1e-12)


def test_exact_disk_inner_products():
    gram = inner_products_disk_constant(2, 2)
    idx = BasisSpec(2, 2).indices
    pos = {key: i for i, key in enumerate(idx)}
    assert gram[pos[(0, 0)]][pos[(0, 0)]] == Fraction(1)
    assert gram[pos[(0, 1)]][pos[(0, 1)]] == Fraction(1, 2)
    assert gram[pos[(1, 1)]][pos[(0, 0)]] == Fraction(1, 2)
    assert gram[pos[(1, 0)]][pos[(0, 1)]] == Fraction(0)


def test_radial_moments_match_exact_disk_values():
    numeric = inner_products_radial(None, None, 2, 4, QUAD, radius=1.0)
    exact = np.array([[float(v) for v in row] for row in inner_products_disk_constant(2, 4)])
    assert np.allclose(numeric, exact, atol=1e-12)


def test_basis_blocks_partition_indices():
    spec = BasisSpec(3, 5)
    flat = np.sort(np.concatenate(spec.blocks()))
    assert np.array_equal(flat, np.arange(spec.size))
    for block in spec.blocks():
        assert len({spec.indices[i][1] - spec.indices[i][0] for i in block}) == 1


def test_model_disk_matches_koshelev(disk_points):
    kernel = gram_kernel_build(DomainSpec.unit_disk(), None, None, BasisSpec(2, 40), quad=QUAD)
    assert kernel.quadrature['method'] == 'exact_rational'
    z = disk_points(12, 0.5)
    w = disk_points(12, 0.5)
    assert np.allclose(kernel.eval(z, w), koshelev_kernel(2, z, w), rtol=1e-6, atol=1e-6)


def test_model_disk_lift_at_origin():
    kernel = gram_kernel_build(DomainSpec.unit_disk(), None, None, BasisSpec(2, 20), quad=QUAD)
    zp, wp = 0.2 - 0.1j, 0.3 + 0.3j
    assert kernel.lift(0j, zp, 0j, wp) == pytest.approx(koshelev_lift(2, 0j, zp, 0j, wp), rel=1e-10)


@pytest.mark.parametrize("m", [1.0, 5.0])
@pytest.mark.parametrize("q", [1, 2])
def test_gaussian_plane_matches_closed_form(q, m, disk_points, gaussian):
    kernel = gram_kernel_build(DomainSpec.plane(m), gaussian, m, BasisSpec(q, 30), quad=QUAD)
    z = disk_points(10, 0.3)
    w = disk_points(10, 0.3)
    expected = gaussian_poly_kernel(q, m, z, w)
    got = kernel.eval(z, w)
    # L^1_1 меняет знак, поэтому допуск относительно масштаба ядра
    assert np.max(np.abs(got - expected)) <= 1e-8 * np.max(np.abs(expected))


def test_kernel_is_hermitian_and_diagonal_positive(quartic, disk_points):
    kernel = gram_kernel_build(DomainSpec.plane(2.0), quartic, 2.0, BasisSpec(2, 20), quad=QUAD)
    z = disk_points(6, 0.8)
    w = disk_points(6, 0.8)
    assert np.allclose(kernel.eval(z, w), np.conj(kernel.eval(w, z)))
    assert np.all(kernel.diag(z) > 0)


def test_non_radial_potential_uses_tensor_grid():
    P = HermitianPotential.from_terms({(1, 1): 1.0, (2, 0): 0.1})
    quad = QuadratureSpec(tensor_radial_nodes=48, tensor_angular_nodes=64)
    kernel = gram_kernel_build(DomainSpec.unit_disk(1.0), P, 1.0, BasisSpec(1, 6), quad=quad)
    assert kernel.quadrature['method'] == 'polar_tensor'
    assert len(kernel.blocks) == 1
    assert kernel.diag(0.1) > 0


def test_out_of_disk_point_rejected():
    kernel = gram_kernel_build(DomainSpec.unit_disk(), None, None, BasisSpec(1, 5), quad=QUAD)
    with pytest.raises(ValidationError) as info:
        kernel.eval(1.2, 0.0)
    assert info.value.code is ErrorCode.OUT_OF_DOMAIN


def test_correlation_kernel_damps_by_weight(gaussian):
    z = 0.3
    expected = gaussian_poly_kernel(1, 1.0, z, z) * np.exp(-2 * abs(z) ** 2)
    got = correlation_kernel(lambda a, b: gaussian_poly_kernel(1, 1.0, a, b), gaussian, 1.0, z, z)
    assert np.real(got) == pytest.approx(expected)


def test_cache_round_trip(tmp_path, gaussian):
    cache = GramCache(str(tmp_path))
    spec = BasisSpec(2, 12)
    cold = gram_kernel_build(DomainSpec.plane(1.0), gaussian, 1.0, spec, quad=QUAD, cache=cache)
    warm = gram_kernel_build(DomainSpec.plane(1.0), gaussian, 1.0, spec, quad=QUAD, cache=cache)
    assert warm.quadrature.get('cached') is True
    z, w = 0.2 + 0.1j, -0.1j
    assert warm.eval(z, w) == cold.eval(z, w)
    assert len(cache.inspect()) == 1


def test_refinement_delta_shrinks_as_n_doubles(gaussian):
    points = [(0.4 + 0.2j, 0.3 - 0.3j), (0.5j, 0.5j), (-0.3, 0.2 + 0.1j)]
    deltas = [n_refinement_delta(DomainSpec.plane(8.0), gaussian, 8.0, BasisSpec(1, n), points, step=5, quad=QUAD)
              for n in (5, 10, 20)]
    assert deltas[0] > deltas[1] > deltas[2]
    assert deltas[2] < 1e-6


def test_choose_n_reaches_target_on_gaussian_plane(gaussian):
    m = 8.0
    points = [(0.4 + 0.2j, 0.3 - 0.3j), (0.5j, 0.5j), (-0.3, 0.2 + 0.1j)]
    n, delta = choose_n(DomainSpec.plane(m), gaussian, m, 1, points, 1e-8, n0=10, quad=QUAD)
    assert delta <= 1e-8
    assert 10 <= n <= 200
    kernel = gram_kernel_build(DomainSpec.plane(m), gaussian, m, BasisSpec(1, n), quad=QUAD)
    z = np.array([p[0] for p in points])
    w = np.array([p[1] for p in points])
    assert np.allclose(kernel.eval(z, w), gaussian_poly_kernel(1, m, z, w), rtol=1e-7)


def test_choose_n_reaches_target_on_model_disk():
    points = [(0.5, 0.4j), (0.3 + 0.3j, 0.3 + 0.3j)]
    n, delta = choose_n(DomainSpec.unit_disk(), None, None, 2, points, 1e-8, n0=10)
    assert delta <= 1e-8
    kernel = gram_kernel_build(DomainSpec.unit_disk(), None, None, BasisSpec(2, n))
    for z, w in points:
        assert kernel.eval(z, w) == pytest.approx(koshelev_kernel(2, z, w), rel=1e-7)
