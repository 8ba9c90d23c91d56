"""
Хранилища: кэш факторов матрицы Грама и запись результатов исследований.
"""

from .gram_cache import GramCache
from .study_storage import StudyStorage

__all__ = ['GramCache', 'StudyStorage']
