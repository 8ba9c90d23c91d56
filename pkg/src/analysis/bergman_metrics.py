"""
Первая и вторая метрики Бергмана, их полианалитические расширения
через подъем ядра и перемасштабированные пределы.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from src.analysis.expansion import approx_lift, fit_slope
from src.config.kernel_config import ACTIVE_CONFIG
from src.models.errors import ErrorCode, raise_for
from src.models.potential import HermitianPotential, eval_potential, laplacian
from src.utils.finite_diff import real_hessian, stencil_points, wirtinger_laplacian
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)


@dataclass
class MetricSample:
    """
    Значение метрики в точке z: изотермическая плотность и коэффициент при dz².
    """
    z: complex
    isothermal: float
    dz2: complex = 0j
    error_estimate: float = float('nan')
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'z': [self.z.real, self.z.imag],
            'isothermal': self.isothermal,
            'dz2': [self.dz2.real, self.dz2.imag],
            'error_estimate': self.error_estimate,
            'provenance': self.provenance
        }


def local_length_scale(P: Optional[HermitianPotential], m: Optional[float], z: complex) -> float:
    """1/√(2mΔQ(z)) для весовых ядер, 1 - |z|² для модельного диска"""
    if P is None or m is None:
        return max(1.0 - abs(z) ** 2, 1e-3)
    return 1.0 / np.sqrt(2.0 * m * laplacian(P, z))


def default_step(scale: float) -> float:
    return ACTIVE_CONFIG.get_config('METRICS_CONFIG')['step_factor'] * scale


# ==================== КЛАССИЧЕСКИЕ МЕТРИКИ ====================

def metric1_density(diag: Callable, weight: Callable, z):
    """Первая метрика: K(z,z)·ω(z)"""
    val = np.asarray(diag(z)) * np.asarray(weight(z))
    return val if val.ndim else float(val)


def metric2_density(diag: Callable, z: complex, h: float, refine: Optional[bool] = None) -> float:
    """
    Вторая метрика: ∂∂̄ log K(z,z) пятиточечным шаблоном с шагом h.

    Raises:
        NumericalError: NONPOSITIVE_DIAGONAL
    """
    refine = ACTIVE_CONFIG.get_config('METRICS_CONFIG')['richardson'] if refine is None else refine
    diag_values = np.asarray(diag(stencil_points(z, h)))
    if np.any(diag_values <= 0):
        raise_for(ErrorCode.NONPOSITIVE_DIAGONAL, "K(z,z) <= 0 в окрестности шаблона", z=str(z))
    val, _ = wirtinger_laplacian(lambda p: np.log(np.asarray(diag(p))), z, h, refine=refine)
    return float(val.real)


# ==================== ПОЛИАНАЛИТИЧЕСКАЯ ПЕРВАЯ МЕТРИКА ====================

def _matrix_interp(lift: Callable, q: int, z: complex, rho: float) -> np.ndarray:
    """
    Точная интерполяция: lift(z, z+a; z, z+b) = Σ ā^k b^k' A_{k,k'} - многочлен степени q-1
    по ā и по b, коэффициенты читаются дискретным преобразованием Фурье по корням из единицы.
    """
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    a = rho * roots
    zz = np.full((q, q), z, dtype=complex)
    G = np.asarray(lift(zz, z + a[:, None] * np.ones((1, q)), zz, z + np.ones((q, 1)) * a[None, :]))
    W = roots[:, None] ** np.arange(q)[None, :]  # W[s, k] = ω^{sk}
    A = W.T @ G @ W.conj() / (q * q)
    scale = rho ** -np.arange(q)
    return A * scale[:, None] * scale[None, :]


def _matrix_stencil(lift: Callable, q: int, z: complex, h: float) -> np.ndarray:
    """Производные по ε конечными разностями (q <= 2)"""
    if q > 2:
        raise_for(ErrorCode.CONFIG_INVALID, "метод stencil поддерживает только q <= 2", q=q)

    def F(eps):
        eps = np.asarray(eps, dtype=complex)
        return np.asarray(lift(np.full(eps.shape, z), z + eps, np.full(eps.shape, z), z + eps))

    A = np.zeros((q, q), dtype=complex)
    A[0, 0] = F(np.array([0j]))[0]
    if q == 2:
        vals = F(np.array([h, -h, 1j * h, -1j * h]))
        d_a = (vals[0] - vals[1]) / (2 * h)
        d_b = (vals[2] - vals[3]) / (2 * h)
        A[0, 1] = 0.5 * (d_a - 1j * d_b)  # ∂_ε
        A[1, 0] = 0.5 * (d_a + 1j * d_b)  # ∂̄_ε
        A[1, 1], _ = wirtinger_laplacian(F, 0j, h)
    return A


def poly_metric1_matrix(lift: Callable, weight: Callable, q: int, z: complex, h: Optional[float] = None,
                        method: Optional[str] = None, rho: float = 0.5) -> np.ndarray:
    """
    Матрица (1/k!)(1/k'!) ∂̄^k_{z'} ∂^{k'}_{z'} E⊗2[K](z,z';z,z')|_{z'=z} · ω(z).

    Args:
        lift: Подъем E⊗2[K](z, z'; w, w')
        weight: Вес ω
        q: Порядок полианалитичности
        z: Точка
        h: Шаг для метода stencil
        method: 'interp' (точная интерполяция) или 'stencil'
        rho: Радиус узлов интерполяции

    Returns:
        Эрмитова матрица q×q
    """
    method = method or ACTIVE_CONFIG.get_config('METRICS_CONFIG')['matrix_method']
    if method == 'interp':
        A = _matrix_interp(lift, q, z, rho)
    elif method == 'stencil':
        A = _matrix_stencil(lift, q, z, h or default_step(1.0))
    else:
        raise_for(ErrorCode.CONFIG_INVALID, f"неизвестный метод матрицы: {method}", method=method)
    A = 0.5 * (A + A.conj().T)
    return A * float(weight(z))


def poly_metric1_density(lift: Callable, weight: Callable, z: complex, eps: complex) -> float:
    """E⊗2[K](z, z+ε; z, z+ε)·ω(z)"""
    val = np.asarray(lift(z, z + eps, z, z + eps)) * np.asarray(weight(z))
    return float(np.real(val))


# ==================== ПОЛИАНАЛИТИЧЕСКАЯ ВТОРАЯ МЕТРИКА ====================

def poly_metric2(lift: Callable, z: complex, eps: complex, h: float,
                 refine: Optional[bool] = None) -> MetricSample:
    """
    Вторая полианалитическая метрика для g = log E⊗2[K](z, z+ε; z, z+ε):
    изотермическая часть (Δ_z + 2Δ_ε - ∂̄_z∂_ε - ∂_z∂̄_ε) g и коэффициент
    при dz² (∂_z∂_ε - ∂²_ε) g.

    Raises:
        NumericalError: NONPOSITIVE_LIFT
    """
    refine = ACTIVE_CONFIG.get_config('METRICS_CONFIG')['richardson'] if refine is None else refine

    def g(points: np.ndarray) -> np.ndarray:
        zz = points[:, 0] + 1j * points[:, 1]
        ee = points[:, 2] + 1j * points[:, 3]
        vals = np.real(np.asarray(lift(zz, zz + ee, zz, zz + ee)))
        if np.any(vals <= 0):
            raise_for(ErrorCode.NONPOSITIVE_LIFT, "подъем ядра <= 0 в точке шаблона", z=str(z), eps=str(eps))
        return np.log(vals)

    x0 = np.array([z.real, z.imag, complex(eps).real, complex(eps).imag])
    H, err = real_hessian(g, x0, h, refine=refine)
    (gxx, gxy, gxa, gxb), (_, gyy, gya, gyb), (_, _, gaa, gab), (_, _, _, gbb) = H
    isothermal = 0.25 * (gxx + gyy) + 0.5 * (gaa + gbb) - 0.5 * (gxa + gyb)
    dz2 = 0.25 * (gxa - gyb - 1j * (gxb + gya)) - 0.25 * (gaa - gbb - 2j * gab)
    return MetricSample(complex(z), float(isothermal), complex(dz2), err,
                        {'h': h, 'eps': [complex(eps).real, complex(eps).imag], 'richardson': bool(refine)})


# ==================== ПЕРЕМАСШТАБИРОВАННЫЕ ПРЕДЕЛЫ ====================

def rescaled_first_limit(eps_prime) -> np.ndarray:
    """π⁻¹(2 + |ε'|²)"""
    return (2.0 + np.abs(np.asarray(eps_prime)) ** 2) / np.pi


def rescaled_second_limit(eps_prime):
    """(1 + 4/(2+|ε'|²)², conj(ε')²/(2+|ε'|²)²)"""
    e = np.asarray(eps_prime, dtype=complex)
    denom = (2.0 + np.abs(e) ** 2) ** 2
    return 1.0 + 4.0 / denom, np.conj(e) ** 2 / denom


@dataclass
class RescaledMetricStudy:
    z: complex
    rows: List[Dict[str, Any]]
    slopes: Dict[str, Optional[float]]

    def column(self, name: str) -> List[float]:
        return [r[name] for r in self.rows]

    def decreasing(self, name: str) -> bool:
        vals = self.column(name)
        return all(b < a for a, b in zip(vals, vals[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {'z': [self.z.real, self.z.imag], 'rows': self.rows, 'slopes': self.slopes}


def rescaled_metric_study(source_for_m: Callable[[float], Any], P: HermitianPotential, z: complex,
                          eps_primes: Sequence[complex], m_list: Sequence[float],
                          second: bool = True, threads: int = 1) -> RescaledMetricStudy:
    """
    Сравнение перемасштабированных полианалитических метрик с пределами при ε = ε'/√(2mΔQ(z)).

    Первая метрика делится на 2mΔQ(z) и сравнивается с π⁻¹(2+|ε'|²);
    вторая (при second) - с 1 + 4/(2+|ε'|²)² и conj(ε')²/(2+|ε'|²)².

    Returns:
        RescaledMetricStudy: по каждому m супремумы ошибок first_error,
        second_iso_error, second_dz2_error
    """
    eps_primes = np.asarray(eps_primes, dtype=complex)
    dq = laplacian(P, z)
    limit1 = rescaled_first_limit(eps_primes)
    limit_iso, limit_dz2 = rescaled_second_limit(eps_primes)

    def one(m: float) -> Dict[str, Any]:
        source = source_for_m(m)
        scale = np.sqrt(2.0 * m * dq)
        eps = eps_primes / scale
        first = np.array([poly_metric1_density(source.lift, source.weight, z, e) for e in eps]) / scale ** 2
        row = {'m': float(m), 'first_error': float(np.max(np.abs(first - limit1)))}
        if second:
            h = default_step(1.0 / scale)
            samples = [poly_metric2(source.lift, z, e, h) for e in eps]
            iso = np.array([s.isothermal for s in samples]) / scale ** 2
            dz2 = np.array([s.dz2 for s in samples]) / scale ** 2
            row['second_iso_error'] = float(np.max(np.abs(iso - limit_iso)))
            row['second_dz2_error'] = float(np.max(np.abs(dz2 - limit_dz2)))
        return row

    rows = parallel_map(one, list(m_list), threads=threads)
    names = ['first_error'] + (['second_iso_error', 'second_dz2_error'] if second else [])
    slopes = {name: fit_slope([r['m'] for r in rows], [r[name] for r in rows]) for name in names}
    logger.info("rescaled_metric_study z=%s m_count=%d slopes=%s", z, len(rows), slopes)
    return RescaledMetricStudy(complex(z), rows, slopes)


def approx_double_diagonal(P: HermitianPotential, m: float, z: complex, eps: complex, k: int = 1) -> float:
    """
    Асимптотическая плотность e^{-2mQ(z)} E⊗2[K^⟨k⟩](z, z+ε; z, z+ε) для q = 2.
    """
    val = approx_lift(P, m, 2, k, z, z + eps, z, z + eps)
    return float(np.real(val) * np.exp(-2.0 * m * eval_potential(P, z)))
