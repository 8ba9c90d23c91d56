"""
Общие фикстуры и профили hypothesis.

Профиль выбирается переменной окружения HYPOTHESIS_PROFILE (default, fast, ci).
"""

import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.models.potential import HermitianPotential  # noqa: E402

settings.register_profile('default', max_examples=30, deadline=None)
settings.register_profile('fast', max_examples=5, deadline=None)
settings.register_profile('ci', max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'default'))


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: исследования сходимости по m (можно исключить через -m "not slow")')


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def gaussian():
    return HermitianPotential.gaussian()


@pytest.fixture
def quartic():
    return HermitianPotential.quartic(0.1)


@pytest.fixture
def disk_points(rng):
    """Равномерные случайные точки в диске |z| < radius"""
    def sample(count: int, radius: float) -> np.ndarray:
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
        return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, count))
    return sample
