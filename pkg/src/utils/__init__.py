"""
Вспомогательные модули: конвертеры, конечные разности, логирование,
параллельное выполнение и SVG-графики.
"""

__all__ = ['converters', 'finite_diff', 'logging_setup', 'parallel', 'svg_plots']
