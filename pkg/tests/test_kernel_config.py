import pytest

from src.config.kernel_config import ACTIVE_CONFIG, PRESETS, FastConfig, KernelConfig, TestingConfig


def test_active_config_is_default():
    assert ACTIVE_CONFIG is KernelConfig
    assert PRESETS['default'] is KernelConfig


def test_presets_override_only_their_sections():
    assert FastConfig.get_config('GRAM_CONFIG')['default_n'] == 20
    assert FastConfig.get_config('JETCAS_CONFIG') == KernelConfig.get_config('JETCAS_CONFIG')
    assert KernelConfig.get_config('GRAM_CONFIG')['default_n'] == 30


@pytest.mark.parametrize("feature, expected", [
    ('gram', True),
    ('cache', True),
    ('plots', True),
    ('dashboard', False),
])
def test_feature_flags(feature, expected):
    assert KernelConfig.is_enabled(feature) is expected


def test_testing_preset_disables_cache_and_plots():
    assert not TestingConfig.is_enabled('cache')
    assert not TestingConfig.is_enabled('plots')


def test_all_configs_cover_sections():
    configs = KernelConfig.get_all_configs()
    assert set(configs) == {'gram', 'jetcas', 'metrics', 'bounds', 'assumptions', 'study', 'cache',
                            'output', 'general'}
    assert configs['jetcas']['max_q1_order'] == 3
    assert configs['jetcas']['max_q2_order'] == 2
    assert configs['bounds']['tolerance'] == 1e-8
    assert KernelConfig.get_config('UNKNOWN') == {}
