import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.models import polyfun
from src.models.errors import ValidationError
from src.models.polyfun import PolyanalyticPoly, extend, singular_matrix, vectorize

coords = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False)


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2 ** 32 - 1), coords, coords)
def test_extension_restricts_to_function(q, n, seed, x, y):
    f = PolyanalyticPoly.random(q, n, np.random.default_rng(seed))
    z = complex(x, y)
    assert extend(f, z, z) == pytest.approx(polyfun.eval(f, z), rel=1e-12, abs=1e-12)


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2 ** 32 - 1), coords, coords)
def test_modulus_squared_through_singular_matrix(q, n, seed, x, y):
    f = PolyanalyticPoly.random(q, n, np.random.default_rng(seed))
    z = complex(x, y)
    v = vectorize(f, z)
    quad = np.conj(v) @ singular_matrix(q, z) @ v
    assert quad.real == pytest.approx(abs(polyfun.eval(f, z)) ** 2, rel=1e-10, abs=1e-10)
    assert abs(quad.imag) < 1e-9 * max(1.0, abs(quad))


def test_extension_is_antiholomorphic_in_second_argument():
    f = PolyanalyticPoly(q=2, n=1, coeffs=np.array([[1.0], [2.0]]))
    assert extend(f, 0.5, 1j) == pytest.approx(1.0 + 2.0 * (-1j))


def test_singular_matrix_has_rank_one():
    A = singular_matrix(3, 0.3 + 0.4j)
    assert np.linalg.matrix_rank(A) == 1
    assert np.allclose(A, A.conj().T)


def test_coefficient_shape_is_checked():
    with pytest.raises(ValidationError):
        PolyanalyticPoly(q=2, n=3, coeffs=np.zeros((3, 2)))


def test_component_is_read_only():
    f = PolyanalyticPoly(q=2, n=2, coeffs=np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert f.component(1).tolist() == [3.0, 4.0]
    with pytest.raises(ValueError):
        f.component(0)[0] = 5.0
