"""
Модель эрмитова полиномиального потенциала Q и области интегрирования.
Поляризация Q(z,w) = Σ c[a][b] z^a w̄^b точная, поэтому все производные,
фазовая функция θ и джеты β вычисляются конечными суммами мономов.
"""

import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.models.errors import ErrorCode, raise_for

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, np.ndarray]

# Допуск эрмитовой симметрии коэффициентов
HERMITIAN_TOL = 1e-12


def _falling(n: int, k: int) -> int:
    """Убывающий факториал n (n-1) ... (n-k+1)"""
    if k > n:
        return 0
    return factorial(n) // factorial(n - k)


@dataclass(frozen=True, eq=False)
class HermitianPotential:
    """
    Эрмитов полином Q(z) = Σ c[a][b] z^a z̄^b.

    Матрица коэффициентов размера (D+1)×(D+1) удовлетворяет
    c[b][a] = conj(c[a][b]), что гарантирует вещественность Q(z).
    """
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if self.degree < 1:
            raise_for(ErrorCode.INVALID_POTENTIAL, "степень потенциала должна быть >= 1", degree=self.degree)
        if c.shape != (self.degree + 1, self.degree + 1):
            raise_for(ErrorCode.INVALID_POTENTIAL, "размер матрицы коэффициентов не совпадает со степенью",
                      shape=list(c.shape), degree=self.degree)
        if not np.all(np.isfinite(c)):
            raise_for(ErrorCode.INVALID_POTENTIAL, "коэффициенты должны быть конечными")
        if not np.allclose(c, c.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
            raise_for(ErrorCode.INVALID_POTENTIAL, "нарушена эрмитова симметрия c[b][a] = conj(c[a][b])")
        c.setflags(write=False)
        object.__setattr__(self, 'coeffs', c)

    # ==================== КОНСТРУКТОРЫ ====================

    @classmethod
    def from_terms(cls, terms: Dict[Tuple[int, int], complex]) -> 'HermitianPotential':
        """
        Строит потенциал по словарю {(a, b): c[a][b]}.

        Симметричные коэффициенты c[b][a] дописываются автоматически,
        если они не заданы явно.
        """
        degree = max(max(a, b) for a, b in terms) if terms else 1
        degree = max(degree, 1)
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for (a, b), value in terms.items():
            c[a, b] = value
            if (b, a) not in terms:
                c[b, a] = np.conj(value)
        return cls(degree=degree, coeffs=c)

    @classmethod
    def gaussian(cls, alpha: float = 1.0) -> 'HermitianPotential':
        """Q = α|z|²"""
        return cls.from_terms({(1, 1): alpha})

    @classmethod
    def quartic(cls, s: float, alpha: float = 1.0) -> 'HermitianPotential':
        """Q = α|z|² + s|z|⁴"""
        return cls.from_terms({(1, 1): alpha, (2, 2): s})

    @classmethod
    def radial(cls, profile: List[float]) -> 'HermitianPotential':
        """Q = Σ_k profile[k-1] |z|^{2k}, k >= 1"""
        return cls.from_terms({(k + 1, k + 1): float(v) for k, v in enumerate(profile)})

    # ==================== СВОЙСТВА ====================

    @property
    def is_radial(self) -> bool:
        """Потенциал радиален, если c[a][b] = 0 при a != b"""
        off = self.coeffs - np.diag(np.diag(self.coeffs))
        return bool(np.all(np.abs(off) <= HERMITIAN_TOL))

    @property
    def is_gaussian(self) -> bool:
        """Q = α|z|² (единственный ненулевой коэффициент c[1][1])"""
        c = self.coeffs.copy()
        alpha = c[1, 1]
        c[1, 1] = 0.0
        return bool(np.all(np.abs(c) <= HERMITIAN_TOL) and alpha.real > 0)

    def nonzero_terms(self) -> List[Tuple[int, int, complex]]:
        return [(a, b, complex(self.coeffs[a, b]))
                for a in range(self.degree + 1) for b in range(self.degree + 1)
                if abs(self.coeffs[a, b]) > 0.0]

    # ==================== СЕРИАЛИЗАЦИЯ ====================

    def to_dict(self) -> Dict[str, Any]:
        """Структурированное представление: степень и четверки [a, b, re, im]"""
        return {
            'degree': self.degree,
            'coeffs': [[a, b, float(v.real), float(v.imag)] for a, b, v in self.nonzero_terms()]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HermitianPotential':
        """Загрузка с повторной проверкой эрмитовой симметрии"""
        try:
            degree = int(data['degree'])
            quads = data['coeffs']
        except (KeyError, TypeError, ValueError) as e:
            raise_for(ErrorCode.INVALID_POTENTIAL, f"неверная запись потенциала: {e}")
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for entry in quads:
            if len(entry) != 4:
                raise_for(ErrorCode.INVALID_POTENTIAL, "коэффициент задается четверкой [a, b, re, im]",
                          entry=entry)
            a, b, re, im = entry
            if not (0 <= int(a) <= degree and 0 <= int(b) <= degree):
                raise_for(ErrorCode.INVALID_POTENTIAL, "индекс коэффициента вне степени", entry=entry)
            c[int(a), int(b)] = complex(float(re), float(im))
        return cls(degree=degree, coeffs=c)


@dataclass(frozen=True)
class DomainSpec:
    """
    Область интегрирования: диск(центр, радиус) или плоскость с радиусом усечения.

    Для модельного диска с постоянным весом 1/π параметр m отсутствует.
    """
    kind: str
    center: complex = 0j
    radius: float = 1.0
    truncation_radius: Optional[float] = None
    m: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ('disk', 'plane'):
            raise_for(ErrorCode.CONFIG_INVALID, f"неизвестный тип области: {self.kind}")
        if self.kind == 'disk' and not self.radius > 0:
            raise_for(ErrorCode.CONFIG_INVALID, "радиус диска должен быть > 0", radius=self.radius)
        if self.truncation_radius is not None and not self.truncation_radius > 0:
            raise_for(ErrorCode.CONFIG_INVALID, "радиус усечения должен быть > 0")
        if self.m is not None and not self.m > 0:
            raise_for(ErrorCode.CONFIG_INVALID, "показатель веса m должен быть > 0", m=self.m)

    @classmethod
    def unit_disk(cls, m: Optional[float] = None) -> 'DomainSpec':
        return cls(kind='disk', center=0j, radius=1.0, m=m)

    @classmethod
    def plane(cls, m: float, truncation_radius: Optional[float] = None) -> 'DomainSpec':
        return cls(kind='plane', truncation_radius=truncation_radius, m=m)

    @property
    def is_model_disk(self) -> bool:
        """Единичный диск с постоянным весом 1/π"""
        return self.kind == 'disk' and self.m is None

    def contains(self, z: complex) -> bool:
        if self.kind == 'plane':
            return True
        return abs(complex(z) - complex(self.center)) < self.radius

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'center': [float(complex(self.center).real), float(complex(self.center).imag)],
            'radius': self.radius,
            'truncation_radius': self.truncation_radius,
            'm': self.m
        }


@dataclass(frozen=True)
class BetaJet:
    """
    Джет β(z,w) = ∂_z∂̄_w Q(z,w) в точке (z, w).

    vals[a][b] = ∂_z^a ∂̄_w^b β(z,w), 0 <= a,b <= J.
    """
    order: int
    vals: np.ndarray
    z: complex
    w: complex

    def __getitem__(self, key: Tuple[int, int]) -> complex:
        a, b = key
        if a > self.order or b > self.order:
            return 0j
        return complex(self.vals[a, b])

    @property
    def beta(self) -> complex:
        return complex(self.vals[0, 0])

    def symbol(self, a: int, b: int) -> complex:
        """Значение символа Q_{a,b} = ∂_z^a ∂̄_w^b Q при a, b >= 1"""
        return self[a - 1, b - 1]


# ==================== ЗНАЧЕНИЯ И ПРОИЗВОДНЫЕ ====================

def q_derivative(P: HermitianPotential, a: int, b: int, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """
    Точная производная ∂_z^a ∂̄_w^b Q(z,w) поляризации.

    Args:
        P: Потенциал
        a: Порядок по z
        b: Порядок по w̄
        z, w: Точки (скаляры или массивы numpy одинаковой формы)

    Returns:
        Значение производной
    """
    z = np.asarray(z, dtype=complex)
    wbar = np.conj(np.asarray(w, dtype=complex))
    total = np.zeros(np.broadcast(z, wbar).shape, dtype=complex)
    for i, k, c in P.nonzero_terms():
        fa = _falling(i, a)
        fb = _falling(k, b)
        if fa == 0 or fb == 0:
            continue
        total = total + c * fa * fb * z ** (i - a) * wbar ** (k - b)
    if total.ndim == 0:
        return complex(total)
    return total


def eval_polarized(P: HermitianPotential, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """Поляризация Q(z,w) = Σ c[a][b] z^a w̄^b"""
    return q_derivative(P, 0, 0, z, w)


def eval_potential(P: HermitianPotential, z: ComplexLike) -> Union[float, np.ndarray]:
    """
    Значение потенциала Q(z) = Q(z,z).

    Мнимая часть отбрасывается после проверки, что она < 1e-12 (относительно масштаба).
    """
    val = np.asarray(eval_polarized(P, z, z))
    scale = np.maximum(1.0, np.abs(val))
    if np.any(np.abs(val.imag) > 1e-12 * scale):
        raise_for(ErrorCode.INVALID_POTENTIAL, "Q(z,z) имеет ненулевую мнимую часть")
    if val.ndim == 0:
        return float(val.real)
    return val.real


def laplacian(P: HermitianPotential, z: ComplexLike) -> Union[float, np.ndarray]:
    """ΔQ(z) = ∂∂̄Q(z) = β(z,z)"""
    val = np.asarray(q_derivative(P, 1, 1, z, z))
    if val.ndim == 0:
        return float(val.real)
    return val.real


def beta_jet(P: HermitianPotential, z: complex, w: complex, J: int) -> BetaJet:
    """
    Джет β до порядка J по каждой переменной.

    Args:
        P: Потенциал
        z, w: Базовая точка
        J: Порядок джета

    Returns:
        BetaJet с точными конечными суммами
    """
    vals = np.zeros((J + 1, J + 1), dtype=complex)
    for a in range(J + 1):
        for b in range(J + 1):
            vals[a, b] = q_derivative(P, a + 1, b + 1, z, w)
    vals.setflags(write=False)
    return BetaJet(order=J, vals=vals, z=complex(z), w=complex(w))


# ==================== ФАЗОВАЯ ФУНКЦИЯ ====================

def _divided_power(a: int, z: np.ndarray, w: np.ndarray, dw: int = 0) -> np.ndarray:
    """
    ∂_w^dw h_{a-1}(z,w), где h_{a-1} = (w^a - z^a)/(w - z) = Σ_{i<a} w^i z^{a-1-i}.
    """
    total = np.zeros(np.broadcast(z, w).shape, dtype=complex)
    for i in range(a):
        coef = _falling(i, dw)
        if coef == 0:
            continue
        total = total + coef * w ** (i - dw) * z ** (a - 1 - i)
    return total


def theta_derivative(P: HermitianPotential, z: ComplexLike, w: ComplexLike,
                     dbar: int = 0, dw: int = 0) -> ComplexLike:
    """
    Производная ∂_w^dw ∂̄_w^dbar θ(z,w) фазовой функции.

    Разностное отношение раскрыто явно, поэтому формула верна и на диагонали.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    wbar = np.conj(w)
    total = np.zeros(np.broadcast(z, w).shape, dtype=complex)
    for a, b, c in P.nonzero_terms():
        if a == 0:
            continue
        fb = _falling(b, dbar)
        if fb == 0:
            continue
        total = total + c * fb * wbar ** (b - dbar) * _divided_power(a, z, w, dw)
    if total.ndim == 0:
        return complex(total)
    return total


def phase_theta(P: HermitianPotential, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """θ(z,w) = (Q(w) - Q(z,w))/(w - z); θ(z,z) = ∂_zQ(z)"""
    return theta_derivative(P, z, w)


def dbar_theta(P: HermitianPotential, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """∂̄_wθ(z,w)"""
    return theta_derivative(P, z, w, dbar=1)


def dbar2_theta(P: HermitianPotential, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """∂̄_w²θ(z,w)"""
    return theta_derivative(P, z, w, dbar=2)


# ==================== ПРОВЕРКА ПРЕДПОЛОЖЕНИЙ ====================

@dataclass
class AssumptionReport:
    """Результат проверки условий (A:i)-(A:iv) на сетке диска"""
    epsilon0: float
    kappa: float
    delta0: float
    a4_holds: bool
    a4_max_violation: float
    min_abs_beta: float
    min_abs_dbar_theta: float
    radius: float
    grid: Tuple[int, int]
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def a3_holds(self) -> bool:
        """Неисчезание β и ∂̄θ на узлах сетки (без сертификации между узлами)"""
        return self.min_abs_beta > 0 and self.min_abs_dbar_theta > 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epsilon0': self.epsilon0,
            'kappa': self.kappa,
            'delta0': self.delta0,
            'a3_holds': self.a3_holds,
            'a4_holds': self.a4_holds,
            'a4_max_violation': self.a4_max_violation,
            'min_abs_beta': self.min_abs_beta,
            'min_abs_dbar_theta': self.min_abs_dbar_theta,
            'radius': self.radius,
            'grid': list(self.grid),
            **self.extra
        }


def polar_grid(center: complex, radius: float, n_radii: int, n_angles: int) -> np.ndarray:
    """Тензорная полярная сетка внутри диска (центр включен отдельно)"""
    radii = radius * (np.arange(1, n_radii + 1) / (n_radii + 1))
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    pts = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    return np.concatenate([[0j], pts]) + complex(center)


def log_laplacian_density(P: HermitianPotential, z: ComplexLike) -> ComplexLike:
    """
    ∂∂̄ log ΔQ(z) через джет β на диагонали: b11/b - b10 b01 / b².
    """
    b = q_derivative(P, 1, 1, z, z)
    b10 = q_derivative(P, 2, 1, z, z)
    b01 = q_derivative(P, 1, 2, z, z)
    b11 = q_derivative(P, 2, 2, z, z)
    return b11 / b - b10 * b01 / b ** 2


def check_assumptions(P: HermitianPotential, disk: DomainSpec, m: Optional[float] = None,
                      n_radii: int = 64, n_angles: int = 64, max_pair_nodes: int = 400) -> AssumptionReport:
    """
    Проверяет условия на потенциал в диске на полярной сетке.

    Args:
        P: Потенциал
        disk: Область типа disk
        m: Показатель веса (для отчета; условия от m не зависят)
        n_radii, n_angles: Размер сетки
        max_pair_nodes: Сколько узлов использовать для проверки по парам

    Returns:
        AssumptionReport с ε₀, κ, δ₀ и булевыми флагами

    Raises:
        ValidationError: FAILS_POSITIVITY, если ΔQ <= 0 хотя бы в одном узле
    """
    if disk.kind != 'disk':
        raise_for(ErrorCode.CONFIG_INVALID, "проверка предположений определена только для диска")

    nodes = polar_grid(disk.center, disk.radius, n_radii, n_angles)
    lap = np.asarray(laplacian(P, nodes))
    if np.any(lap <= 0):
        bad = int(np.argmin(lap))
        raise_for(ErrorCode.FAILS_POSITIVITY, "ΔQ <= 0 в узле сетки",
                  node=[float(nodes[bad].real), float(nodes[bad].imag)], value=float(lap[bad]))
    epsilon0 = float(lap.min())

    kappa_vals = -np.real(log_laplacian_density(P, nodes)) / (2.0 * lap)
    kappa = float(kappa_vals.max())

    # Проверка по парам на прореженной сетке
    stride = max(1, int(np.ceil(len(nodes) / max_pair_nodes)))
    sub = nodes[::stride]
    zz, ww = np.meshgrid(sub, sub, indexing='ij')
    q_zw = np.asarray(eval_polarized(P, zz, ww))
    q_z = np.asarray(eval_potential(P, zz))
    q_w = np.asarray(eval_potential(P, ww))
    lhs = 2 * q_zw.real - q_z - q_w
    rhs = -0.5 * np.asarray(laplacian(P, zz)) * np.abs(zz - ww) ** 2
    violation = lhs - rhs
    scale = np.maximum(1.0, np.abs(rhs))
    a4_max_violation = float(np.max(violation / scale))
    a4_holds = bool(a4_max_violation <= 1e-12)

    min_abs_beta = float(np.min(np.abs(q_derivative(P, 1, 1, zz, ww))))
    min_abs_dbar_theta = float(np.min(np.abs(dbar_theta(P, zz, ww))))

    delta0 = disk.radius ** 2 * epsilon0 / 18.0

    if not a4_holds:
        logger.warning("assumption_a4_violated max_violation=%.3e", a4_max_violation)

    report = AssumptionReport(
        epsilon0=epsilon0,
        kappa=kappa,
        delta0=delta0,
        a4_holds=a4_holds,
        a4_max_violation=a4_max_violation,
        min_abs_beta=min_abs_beta,
        min_abs_dbar_theta=min_abs_dbar_theta,
        radius=disk.radius,
        grid=(n_radii, n_angles),
        extra={'m': m, 'pair_nodes': int(len(sub))}
    )
    logger.info("assumptions_checked epsilon0=%.6g kappa=%.6g delta0=%.6g", epsilon0, kappa, delta0)
    return report
