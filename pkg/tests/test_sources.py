import numpy as np
import pytest

from src.analysis.closedform import gaussian_poly_kernel, koshelev_kernel
from src.analysis.sources import ApproxSource, GaussianSource, GramSource, KoshelevSource, make_source
from src.models.errors import ErrorCode, ValidationError
from src.models.potential import DomainSpec, HermitianPotential


def test_closed_form_picks_family(gaussian):
    assert isinstance(make_source('closedform', None, None, 2, domain=DomainSpec.unit_disk()), KoshelevSource)
    assert isinstance(make_source('closedform', gaussian, 3.0, 2), GaussianSource)


def test_closed_form_rescales_gaussian_strength():
    P = HermitianPotential.gaussian(2.0)
    source = make_source('closedform', P, 3.0, 1)
    assert source.eval(0.1, 0.2j) == pytest.approx(gaussian_poly_kernel(1, 6.0, 0.1, 0.2j))


def test_closed_form_unavailable_for_quartic(quartic):
    with pytest.raises(ValidationError) as info:
        make_source('closedform', quartic, 3.0, 2)
    assert info.value.code is ErrorCode.CONFIG_INVALID


def test_unknown_kind_and_missing_potential():
    with pytest.raises(ValidationError):
        make_source('spline', None, None, 1)
    with pytest.raises(ValidationError):
        make_source('approx', None, 2.0, 1)


def test_sources_share_interface(gaussian):
    sources = [
        make_source('gram', None, None, 2, domain=DomainSpec.unit_disk(), n=20),
        KoshelevSource(2),
    ]
    assert isinstance(sources[0], GramSource)
    for source in sources:
        assert source.diag(0.3) == pytest.approx(koshelev_kernel(2, 0.3, 0.3).real, rel=1e-8)
        assert source.weight(0.3) == pytest.approx(1.0 / np.pi)
        assert source.describe()['q'] == 2


def test_approx_source_weight(quartic):
    source = ApproxSource(quartic, 2.0, 2, 1)
    z = 0.5
    assert source.weight(z) == pytest.approx(np.exp(-4.0 * (0.25 + 0.1 * 0.0625)))
    assert source.describe() == {'kind': 'approx', 'q': 2, 'm': 2.0, 'k': 1, 'origin': 'printed'}


def test_approx_origin_solved_matches_printed_q1(quartic):
    printed = make_source('approx', quartic, 3.0, 1, k=1)
    solved = make_source('approx', quartic, 3.0, 1, k=1, origin='solved')
    z, w = 0.2 + 0.1j, 0.25 - 0.05j
    assert solved.eval(z, w) == pytest.approx(printed.eval(z, w), rel=1e-12)
