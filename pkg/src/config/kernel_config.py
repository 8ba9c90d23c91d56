"""
Конфигурационный файл для численных и символьных расчетов ядер.
Все параметры квадратур, сеток, усечений и вывода настраиваются здесь.
"""

from typing import Dict, Any


class KernelConfig:
    """
    Класс с конфигурацией вычислений.
    Содержит настройки для всех модулей системы.
    """

    # ==================== МАТРИЦА ГРАМА ====================
    GRAM_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'radial_nodes': 256,  # Узлы Гаусса-Лежандра на [0, R]
        'max_node_doublings': 4,  # Сколько раз удваивать узлы до отказа
        'quadrature_rel_tol': 1e-10,  # Допустимое относительное изменение при удвоении
        'tensor_radial_nodes': 128,  # 2D полярная сетка для нерадиальных потенциалов
        'tensor_angular_nodes': 256,
        'tail_tolerance': 1e-30,  # Хвост веса за радиусом усечения
        'ill_conditioned_threshold': 1e12,  # Порог предупреждения ILL_CONDITIONED
        'eigen_floor': 1e-14,  # Порог отсечения собственных значений в резервном разложении
        'default_n': 30,  # Число голоморфных степеней по умолчанию
        'refinement_step': 10,  # Шаг по n для контроля усечения базиса
        'refinement_rel_tol': 1e-3,
        'max_n': 200,
        'radial_blocking': True  # Блочная структура по угловому индексу
    }

    # ==================== СИМВОЛЬНЫЙ ДВИЖОК ====================
    JETCAS_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'truncation': 6,  # Степень джета T
        'm_grades': 3,  # Число сохраняемых степеней 1/(2m)
        'max_q1_order': 3,
        'max_q2_order': 2
    }

    # ==================== МЕТРИКИ ====================
    METRICS_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'step_factor': 1e-4,  # h = step_factor / sqrt(2m ΔQ)
        'richardson': True,  # Одна экстраполяция Ричардсона
        'matrix_method': 'interp'  # 'interp' (точная интерполяция) или 'stencil'
    }

    # ==================== ОЦЕНКИ ТОЧЕЧНЫХ ЗНАЧЕНИЙ ====================
    BOUNDS_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'radial_nodes': 128,
        'angular_nodes': 256,
        'trials': 1000,  # Число случайных испытаний на каждое утверждение
        'max_degree': 6,
        'coeff_bound': 1.0,
        'tolerance': 1e-8  # lhs <= rhs * (1 + tolerance)
    }

    # ==================== ПРОВЕРКА ПРЕДПОЛОЖЕНИЙ ====================
    ASSUMPTIONS_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'grid_radii': 64,
        'grid_angles': 64
    }

    # ==================== ИССЛЕДОВАНИЯ СХОДИМОСТИ ====================
    STUDY_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'slope_band': (-1.1, -0.4),  # Допустимый наклон log-log ошибки
        'near_diagonal_factor': 3.0,  # |z-w| <= factor / sqrt(2m ΔQ)
        'truncation_ratio': 0.1  # n_refinement_delta < ratio * sup_error
    }

    # ==================== КЭШ ФАКТОРОВ ГРАМА ====================
    CACHE_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'env_var': 'BERGMAN_CACHE_DIR',  # Переменная окружения с каталогом кэша
        'default_dir': 'data/gram_cache'
    }

    # ==================== ВЫВОД ====================
    OUTPUT_CONFIG: Dict[str, Any] = {
        'enabled': True,
        'float_digits': 17,  # Значащие цифры в CSV
        'schema_version': 1,
        'plots': True  # SVG графики исследований
    }

    # ==================== ОБЩИЕ НАСТРОЙКИ ====================
    GENERAL_CONFIG: Dict[str, Any] = {
        'log_level': 'INFO',  # Уровень логирования (DEBUG, INFO, WARNING, ERROR)
        'threads': 1,
        'seed': 0
    }

    @classmethod
    def get_config(cls, config_name: str) -> Dict[str, Any]:
        """
        Получает конфигурацию по имени.

        Args:
            config_name: Имя конфигурации (например, 'GRAM_CONFIG')

        Returns:
            Словарь с конфигурацией
        """
        return getattr(cls, config_name, {})

    @classmethod
    def is_enabled(cls, feature: str) -> bool:
        """
        Проверяет, включена ли функция.

        Args:
            feature: Название функции ('gram', 'jetcas', 'metrics', 'bounds', 'cache', 'plots')

        Returns:
            True если функция включена
        """
        if feature == 'plots':
            return bool(cls.OUTPUT_CONFIG.get('plots', False))

        config_map = {
            'gram': 'GRAM_CONFIG',
            'jetcas': 'JETCAS_CONFIG',
            'metrics': 'METRICS_CONFIG',
            'bounds': 'BOUNDS_CONFIG',
            'assumptions': 'ASSUMPTIONS_CONFIG',
            'study': 'STUDY_CONFIG',
            'cache': 'CACHE_CONFIG'
        }

        config_name = config_map.get(feature)
        if not config_name:
            return False

        config = cls.get_config(config_name)
        return config.get('enabled', False)

    @classmethod
    def get_all_configs(cls) -> Dict[str, Dict[str, Any]]:
        """
        Возвращает все конфигурации.

        Returns:
            Словарь со всеми конфигурациями
        """
        return {
            'gram': cls.GRAM_CONFIG,
            'jetcas': cls.JETCAS_CONFIG,
            'metrics': cls.METRICS_CONFIG,
            'bounds': cls.BOUNDS_CONFIG,
            'assumptions': cls.ASSUMPTIONS_CONFIG,
            'study': cls.STUDY_CONFIG,
            'cache': cls.CACHE_CONFIG,
            'output': cls.OUTPUT_CONFIG,
            'general': cls.GENERAL_CONFIG
        }


# ==================== ПРЕСЕТЫ КОНФИГУРАЦИЙ ====================

class FastConfig(KernelConfig):
    """
    Быстрая конфигурация для черновых прогонов: меньше узлов и испытаний.
    """
    GRAM_CONFIG = {**KernelConfig.GRAM_CONFIG, 'radial_nodes': 128, 'default_n': 20}
    BOUNDS_CONFIG = {**KernelConfig.BOUNDS_CONFIG, 'radial_nodes': 64, 'angular_nodes': 128, 'trials': 100}
    ASSUMPTIONS_CONFIG = {**KernelConfig.ASSUMPTIONS_CONFIG, 'grid_radii': 24, 'grid_angles': 24}


class PrecisionConfig(KernelConfig):
    """
    Конфигурация повышенной точности: больше узлов, глубже джеты.
    """
    GRAM_CONFIG = {**KernelConfig.GRAM_CONFIG, 'radial_nodes': 512, 'tensor_radial_nodes': 256,
                   'tensor_angular_nodes': 512}
    JETCAS_CONFIG = {**KernelConfig.JETCAS_CONFIG, 'truncation': 8}


class TestingConfig(KernelConfig):
    """
    Конфигурация для тестов: маленькие сетки, без кэша и графиков.
    """
    __test__ = False

    BOUNDS_CONFIG = {**KernelConfig.BOUNDS_CONFIG, 'radial_nodes': 96, 'angular_nodes': 128, 'trials': 200}
    ASSUMPTIONS_CONFIG = {**KernelConfig.ASSUMPTIONS_CONFIG, 'grid_radii': 16, 'grid_angles': 16}
    CACHE_CONFIG = {**KernelConfig.CACHE_CONFIG, 'enabled': False}
    OUTPUT_CONFIG = {**KernelConfig.OUTPUT_CONFIG, 'plots': False}


PRESETS = {
    'default': KernelConfig,
    'fast': FastConfig,
    'precision': PrecisionConfig,
    'testing': TestingConfig
}

# Выбор активной конфигурации
ACTIVE_CONFIG = KernelConfig  # Можно изменить на FastConfig, PrecisionConfig или TestingConfig
