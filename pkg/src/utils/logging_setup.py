"""
Настройка логирования: один обработчик stderr, строки вида key=value.
"""

import logging
import os
import sys
from typing import Optional

from src.config.kernel_config import ACTIVE_CONFIG

LOG_FORMAT = "ts=%(asctime)s level=%(levelname)s logger=%(name)s msg=%(message)s"
ENV_LEVEL = 'BERGMAN_LOG_LEVEL'


def resolve_level(level: Optional[str] = None) -> int:
    """Уровень: аргумент, затем BERGMAN_LOG_LEVEL, затем GENERAL_CONFIG"""
    name = level or os.getenv(ENV_LEVEL) or ACTIVE_CONFIG.get_config('GENERAL_CONFIG')['log_level']
    value = logging.getLevelName(str(name).upper())
    return value if isinstance(value, int) else logging.INFO


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Настраивает корневой логгер пакета src.

    Повторный вызов заменяет обработчик, а не добавляет второй.
    """
    root = logging.getLogger('src')
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%dT%H:%M:%S'))
    root.addHandler(handler)
    root.setLevel(resolve_level(level))
    root.propagate = False
    return root
