"""
Параллельное выполнение независимых задач с сохранением порядка результатов.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Применяет fn ко всем элементам.

    Args:
        fn: Чистая функция одного аргумента
        items: Входные элементы
        threads: Число потоков; 1 означает последовательное выполнение

    Returns:
        Результаты в порядке входных элементов (вывод не зависит от threads)
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("parallel_map tasks=%d threads=%d", len(items), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
