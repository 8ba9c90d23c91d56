"""
Численные модули: эталонные ядра, матрица Грама, асимптотическое разложение,
метрики Бергмана, оценки точечных значений и источники ядер.
"""

__all__ = ['closedform', 'gram', 'expansion', 'bergman_metrics', 'bounds', 'sources']
