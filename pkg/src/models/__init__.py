"""
Модели данных для вычисления ядер.
Содержит коды ошибок, эрмитовы потенциалы, области и полианалитические многочлены.
"""

from .errors import ErrorCode, KernelError, ValidationError, NumericalError, ConfigError
from .potential import HermitianPotential, DomainSpec, BetaJet, AssumptionReport
from .polyfun import PolyanalyticPoly

__all__ = [
    'ErrorCode', 'KernelError', 'ValidationError', 'NumericalError', 'ConfigError',
    'HermitianPotential', 'DomainSpec', 'BetaJet', 'AssumptionReport',
    'PolyanalyticPoly'
]
