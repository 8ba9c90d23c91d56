"""
Конфигурация запуска CLI: JSON-файл с вложенными секциями.

Незаданные значения берутся из активного пресета; полностью разрешенная
конфигурация записывается рядом с результатами и воспроизводит запуск.
"""

import copy
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.analysis.gram import QuadratureSpec
from src.config.kernel_config import ACTIVE_CONFIG, PRESETS
from src.models.errors import ErrorCode, KernelError, raise_for
from src.models.potential import DomainSpec, HermitianPotential

logger = logging.getLogger(__name__)

POTENTIAL_KINDS = ('gaussian', 'quartic', 'radial', 'terms', 'none')
SOURCE_KINDS = ('gram', 'closedform', 'approx')


def _defaults(config) -> Dict[str, Any]:
    """Полное дерево значений по умолчанию для пресета"""
    gram = config.get_config('GRAM_CONFIG')
    jetcas = config.get_config('JETCAS_CONFIG')
    metrics = config.get_config('METRICS_CONFIG')
    bounds = config.get_config('BOUNDS_CONFIG')
    output = config.get_config('OUTPUT_CONFIG')
    general = config.get_config('GENERAL_CONFIG')
    return {
        'preset': 'default',
        'seed': general['seed'],
        'threads': general['threads'],
        'potential': {'kind': 'quartic', 'alpha': 1.0, 's': 0.1, 'profile': None, 'degree': None, 'coeffs': None},
        'domain': {'kind': 'plane', 'center': [0.0, 0.0], 'radius': 1.0, 'truncation_radius': None},
        'kernel': {
            'q': 2, 'm': 8.0, 'n': gram['default_n'], 'source': 'gram', 'k': 1,
            'points': [[0.0, 0.0, 0.1, 0.0], [0.1, 0.05, -0.05, 0.1]],
            'choose_n': False, 'target': 1e-6, 'compare_closedform': True
        },
        'study': {
            'source': 'gram', 'q': 2, 'm_list': [4.0, 8.0, 16.0, 32.0], 'z0': [0.0, 0.0],
            'grid_radius': 2.0, 'grid_count': 9, 'signed': False
        },
        'metrics': {
            'source': 'gram', 'z': [0.0, 0.0], 'm_list': [4.0, 8.0, 16.0, 32.0],
            'eps_primes': [[0.5, 0.0], [1.0, 0.5]], 'second': True, 'method': metrics['matrix_method'],
            'richardson': metrics['richardson']
        },
        'bounds': {'trials': bounds['trials']},
        'symbolic': {'q': 2, 'max_order': 1, 'truncation': jetcas['truncation'], 'origin': 'printed',
                     'pretty': False, 'identity_trials': 5},
        'quadrature': {
            'radial_nodes': gram['radial_nodes'], 'max_doublings': gram['max_node_doublings'],
            'rel_tol': gram['quadrature_rel_tol'], 'tensor_radial_nodes': gram['tensor_radial_nodes'],
            'tensor_angular_nodes': gram['tensor_angular_nodes'], 'tail_tolerance': gram['tail_tolerance']
        },
        'output': {'plots': output['plots'], 'float_digits': output['float_digits']}
    }


def _merge(base: Dict[str, Any], update: Dict[str, Any], path: str = '') -> Dict[str, Any]:
    """Рекурсивное слияние; неизвестные ключи - ошибка CONFIG_INVALID"""
    out = copy.deepcopy(base)
    for key, value in update.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise_for(ErrorCode.CONFIG_INVALID, f"неизвестный ключ конфигурации: {where}", key=where)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise_for(ErrorCode.CONFIG_INVALID, f"секция {where} должна быть объектом", key=where)
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def _complex(pair: Any, where: str) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, (int, float)) for v in pair):
        return complex(pair[0], pair[1])
    raise_for(ErrorCode.CONFIG_INVALID, f"{where}: ожидается [re, im]", key=where)


@dataclass
class RunConfig:
    """
    Разрешенная конфигурация запуска.

    Attributes:
        values: Полное дерево значений (после слияния с пресетом)
        source_path: Файл, из которого загружена конфигурация
    """
    values: Dict[str, Any]
    source_path: Optional[str] = None
    overrides: List[str] = field(default_factory=list)

    # ==================== ЗАГРУЗКА ====================

    @classmethod
    def defaults(cls, preset: str = 'default') -> 'RunConfig':
        if preset not in PRESETS:
            raise_for(ErrorCode.CONFIG_INVALID, f"неизвестный пресет: {preset}", preset=preset)
        values = _defaults(PRESETS[preset])
        values['preset'] = preset
        return cls(values)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source_path: Optional[str] = None) -> 'RunConfig':
        """
        Raises:
            ValidationError: CONFIG_INVALID при неизвестных ключах или неверных значениях
        """
        if not isinstance(data, dict):
            raise_for(ErrorCode.CONFIG_INVALID, "корень конфигурации должен быть объектом")
        preset = data.get('preset', 'default')
        base = cls.defaults(preset).values
        run = cls(_merge(base, data), source_path)
        run.validate()
        return run

    @classmethod
    def load(cls, path: str, preset: Optional[str] = None) -> 'RunConfig':
        """
        Загружает конфигурацию из JSON-файла.

        Args:
            path: Путь к файлу
            preset: Пресет, заменяющий указанный в файле

        Raises:
            ConfigError: CONFIG_PARSE с номером строки и столбца
            ValidationError: CONFIG_INVALID
        """
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise_for(ErrorCode.CONFIG_PARSE, f"ошибка разбора {path}: {e.msg}",
                      path=path, line=e.lineno, column=e.colno)
        except OSError as e:
            raise_for(ErrorCode.CONFIG_PARSE, f"не удалось прочитать {path}: {e}", path=path)
        if preset is not None and isinstance(data, dict):
            data['preset'] = preset
        logger.info("run_config_loaded path=%s", path)
        return cls.from_dict(data, source_path=path)

    # ==================== ПРОВЕРКИ ====================

    def validate(self):
        v = self.values
        if v['potential']['kind'] not in POTENTIAL_KINDS:
            raise_for(ErrorCode.CONFIG_INVALID, f"potential.kind должен быть одним из {POTENTIAL_KINDS}")
        for section in ('kernel', 'study', 'metrics'):
            if v[section]['source'] not in SOURCE_KINDS:
                raise_for(ErrorCode.CONFIG_INVALID, f"{section}.source должен быть одним из {SOURCE_KINDS}")
        for section in ('kernel', 'study', 'symbolic'):
            if not isinstance(v[section]['q'], int) or v[section]['q'] < 1:
                raise_for(ErrorCode.CONFIG_INVALID, f"{section}.q должно быть целым >= 1")
        for section in ('study', 'metrics'):
            ms = v[section]['m_list']
            if not ms or any(not isinstance(m, (int, float)) or m <= 0 for m in ms):
                raise_for(ErrorCode.CONFIG_INVALID, f"{section}.m_list должен содержать числа > 0")
        if v['symbolic']['origin'] not in ('printed', 'solved'):
            raise_for(ErrorCode.CONFIG_INVALID, "symbolic.origin: 'printed' или 'solved'")
        # Проверка объектов предметной области
        self.potential()
        self.domain(float(v['kernel']['m']))

    def check(self) -> Tuple[bool, str]:
        """Вердикт без исключения"""
        try:
            self.validate()
        except KernelError as e:
            return False, e.message
        return True, "OK"

    # ==================== ОБЪЕКТЫ ====================

    @property
    def config_class(self):
        return PRESETS.get(self.values['preset'], ACTIVE_CONFIG)

    @property
    def seed(self) -> int:
        return int(self.values['seed'])

    @property
    def threads(self) -> int:
        return int(self.values['threads'])

    def section(self, name: str) -> Dict[str, Any]:
        return self.values[name]

    def potential(self) -> Optional[HermitianPotential]:
        """Потенциал из секции potential (None для модельного диска)"""
        p = self.values['potential']
        kind = p['kind']
        if kind == 'none':
            return None
        if kind == 'gaussian':
            return HermitianPotential.gaussian(float(p['alpha']))
        if kind == 'quartic':
            return HermitianPotential.quartic(float(p['s']), float(p['alpha']))
        if kind == 'radial':
            if not p['profile']:
                raise_for(ErrorCode.CONFIG_INVALID, "potential.profile обязателен для kind=radial")
            return HermitianPotential.radial(p['profile'])
        return HermitianPotential.from_dict({'degree': p['degree'], 'coeffs': p['coeffs']})

    def domain(self, m: Optional[float]) -> DomainSpec:
        d = self.values['domain']
        if d['kind'] == 'disk':
            weight_m = None if self.values['potential']['kind'] == 'none' else m
            return DomainSpec(kind='disk', center=_complex(d['center'], 'domain.center'),
                              radius=float(d['radius']), m=weight_m)
        if self.values['potential']['kind'] == 'none':
            raise_for(ErrorCode.CONFIG_INVALID, "плоскость требует весовой потенциал")
        return DomainSpec.plane(m, d['truncation_radius'])

    def quadrature(self):
        return QuadratureSpec(**self.values['quadrature'])

    def point(self, section: str, key: str) -> complex:
        return _complex(self.values[section][key], f"{section}.{key}")

    def points(self, section: str, key: str) -> List[complex]:
        return [_complex(p, f"{section}.{key}") for p in self.values[section][key]]

    def kernel_points(self) -> List[Tuple[complex, complex]]:
        out = []
        for row in self.values['kernel']['points']:
            if not isinstance(row, list) or len(row) != 4:
                raise_for(ErrorCode.CONFIG_INVALID, "kernel.points: строки [z_re, z_im, w_re, w_im]")
            out.append((complex(row[0], row[1]), complex(row[2], row[3])))
        return out

    # ==================== ЭХО ====================

    def apply_overrides(self, seed: Optional[int] = None, threads: Optional[int] = None) -> 'RunConfig':
        """Значения флагов CLI имеют приоритет над файлом"""
        values = copy.deepcopy(self.values)
        overrides = list(self.overrides)
        if seed is not None:
            values['seed'] = seed
            overrides.append('seed')
        if threads is not None:
            values['threads'] = threads
            overrides.append('threads')
        return RunConfig(values, self.source_path, overrides)

    def resolved(self) -> Dict[str, Any]:
        return copy.deepcopy(self.values)
