"""
Конфигурация вычислений ядер.
Содержит настройки для всех модулей системы и пресеты.

RunConfig импортируется напрямую из src.config.run_config.
"""

from .kernel_config import (
    KernelConfig,
    FastConfig,
    PrecisionConfig,
    TestingConfig,
    PRESETS,
    ACTIVE_CONFIG
)

__all__ = [
    'KernelConfig',
    'FastConfig',
    'PrecisionConfig',
    'TestingConfig',
    'PRESETS',
    'ACTIVE_CONFIG'
]
