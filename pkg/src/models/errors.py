"""
Коды ошибок и исключения вычислительного ядра.
Каждая ошибка несет код, категорию и словарь деталей для структурированного лога.
"""

from enum import Enum
from typing import Any, Dict


class ErrorCategory(Enum):
    """Категория ошибки (определяет код выхода CLI)"""
    VALIDATION = "validation"
    NUMERICAL = "numerical"
    CONFIG = "config"


class ErrorCode(Enum):
    """Коды ошибок всех модулей"""
    # ==================== ВАЛИДАЦИЯ ====================
    INVALID_POTENTIAL = ("INVALID_POTENTIAL", ErrorCategory.VALIDATION)
    FAILS_POSITIVITY = ("FAILS_POSITIVITY", ErrorCategory.VALIDATION)
    OUT_OF_DOMAIN = ("OUT_OF_DOMAIN", ErrorCategory.VALIDATION)
    ORDER_UNAVAILABLE = ("ORDER_UNAVAILABLE", ErrorCategory.VALIDATION)
    PSI_NOT_NONPOSITIVE = ("PSI_NOT_NONPOSITIVE", ErrorCategory.VALIDATION)
    UBAR_DEGREE_TOO_HIGH = ("UBAR_DEGREE_TOO_HIGH", ErrorCategory.VALIDATION)
    TRUNCATION_EXHAUSTED = ("TRUNCATION_EXHAUSTED", ErrorCategory.VALIDATION)

    # ==================== ЧИСЛЕННЫЕ ====================
    NOT_POSITIVE_DEFINITE = ("NOT_POSITIVE_DEFINITE", ErrorCategory.NUMERICAL)
    QUADRATURE_UNCONVERGED = ("QUADRATURE_UNCONVERGED", ErrorCategory.NUMERICAL)
    ILL_CONDITIONED = ("ILL_CONDITIONED", ErrorCategory.NUMERICAL)
    INEXACT_DIVISION = ("INEXACT_DIVISION", ErrorCategory.NUMERICAL)
    SOLVER_INCONSISTENT = ("SOLVER_INCONSISTENT", ErrorCategory.NUMERICAL)
    BETA_ZERO = ("BETA_ZERO", ErrorCategory.NUMERICAL)
    NONPOSITIVE_DIAGONAL = ("NONPOSITIVE_DIAGONAL", ErrorCategory.NUMERICAL)
    NONPOSITIVE_LIFT = ("NONPOSITIVE_LIFT", ErrorCategory.NUMERICAL)
    DIVERGENT = ("DIVERGENT", ErrorCategory.NUMERICAL)

    # ==================== КОНФИГУРАЦИЯ ====================
    CONFIG_INVALID = ("CONFIG_INVALID", ErrorCategory.VALIDATION)
    CONFIG_PARSE = ("CONFIG_PARSE", ErrorCategory.CONFIG)

    @property
    def category(self) -> ErrorCategory:
        """Категория кода"""
        return self.value[1]

    @property
    def label(self) -> str:
        return self.value[0]


# Код выхода CLI для каждой категории
EXIT_CODES: Dict[ErrorCategory, int] = {
    ErrorCategory.VALIDATION: 1,
    ErrorCategory.NUMERICAL: 2,
    ErrorCategory.CONFIG: 3,
}


class KernelError(Exception):
    """
    Базовое исключение пакета.

    Args:
        code: Код ошибки
        message: Человекочитаемое описание
        **details: Дополнительные поля (индекс пивота, узел сетки и т.п.)
    """

    def __init__(self, code: ErrorCode, message: str = "", **details: Any):
        self.code = code
        self.message = message or code.label
        self.details: Dict[str, Any] = details
        super().__init__(f"{code.label}: {self.message}")

    @property
    def exit_code(self) -> int:
        """Код выхода процесса для этой ошибки"""
        return EXIT_CODES[self.code.category]

    def to_dict(self) -> Dict[str, Any]:
        return {'code': self.code.label, 'message': self.message, 'details': self.details}


class ValidationError(KernelError):
    """Ошибка входных данных или предусловий операции"""


class NumericalError(KernelError):
    """Численный сбой (не положительно определенная матрица, расходимость и т.п.)"""


class ConfigError(KernelError):
    """Ошибка разбора файла конфигурации"""


def raise_for(code: ErrorCode, message: str = "", **details: Any) -> None:
    """
    Поднимает исключение подходящего класса для кода.

    Raises:
        ValidationError / NumericalError / ConfigError
    """
    if code.category is ErrorCategory.NUMERICAL:
        raise NumericalError(code, message, **details)
    if code.category is ErrorCategory.CONFIG:
        raise ConfigError(code, message, **details)
    raise ValidationError(code, message, **details)
