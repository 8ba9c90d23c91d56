"""
Численное вычисление коэффициентов асимптотического разложения,
приближенных ядер K^⟨k⟩ и исследование универсальности при раздутии.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.analysis.closedform import limit_blowup_kernel, limit_blowup_kernel_signed
from src.config.kernel_config import ACTIVE_CONFIG
from src.jetcas.coeff import CoeffExpr
from src.jetcas.solver import BianalyticCoeffs, printed_q2, solve_expansion_q1, solve_expansion_q2
from src.models.errors import ErrorCode, raise_for
from src.models.potential import (HermitianPotential, dbar2_theta, dbar_theta, eval_polarized,
                                  eval_potential, laplacian, q_derivative)
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

BETA_ZERO_TOL = 1e-300

Coefficient = Union[CoeffExpr, BianalyticCoeffs]


class SymbolLookup:
    """
    Значения символов Q_{a,b} = ∂_z^a ∂̄_w^b Q(z,w) в точках (z, w) с кэшированием.
    """

    def __init__(self, P: HermitianPotential, z, w):
        self.P = P
        self.z = np.asarray(z, dtype=complex)
        self.w = np.asarray(w, dtype=complex)
        self._cache: Dict[Tuple[int, int], Any] = {}

    def __call__(self, a: int, b: int):
        if (a, b) not in self._cache:
            self._cache[(a, b)] = q_derivative(self.P, a, b, self.z, self.w)
        return self._cache[(a, b)]

    def check_beta(self):
        if np.any(np.abs(self(1, 1)) <= BETA_ZERO_TOL):
            raise_for(ErrorCode.BETA_ZERO, "β(z,w) = 0 в точке вычисления")


# ==================== НАБОРЫ КОЭФФИЦИЕНТОВ ====================

@dataclass
class ExpansionCoefficientSet:
    """
    Коэффициенты π·L^q_j, j = 0..max_order, и их вычисление.

    Коэффициенты q = 2 хранятся в базисе {1, ū, u, uū} с u = w - z, ū = w̄ - z̄.
    """
    q: int
    coeffs: List[Coefficient]
    origin: str = 'printed'
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def orders(self) -> List[int]:
        return list(range(len(self.coeffs)))

    def _check_order(self, j: int):
        if not 0 <= j < len(self.coeffs):
            raise_for(ErrorCode.ORDER_UNAVAILABLE, f"порядок {j} недоступен для q={self.q}",
                      q=self.q, available=len(self.coeffs))

    def evaluate_jet(self, j: int, lookup: Callable[[int, int], Any], u, ubar):
        """L^q_j по значениям символов и смещениям u, ū (без множителя 1/π)"""
        self._check_order(j)
        c = self.coeffs[j]
        if isinstance(c, BianalyticCoeffs):
            val = c.evaluate(lookup, u, ubar)
        else:
            val = c.evaluate(lookup)
        return np.asarray(val) / np.pi

    def lift(self, j: int, P: HermitianPotential, z, zprime, w, wprime):
        """
        Подъем L^q_j: u -> w' - z, ū -> w̄ - z̄'; символы берутся в (z, w).

        Raises:
            NumericalError: BETA_ZERO при j >= 1
        """
        lookup = SymbolLookup(P, z, w)
        if j >= 1:
            lookup.check_beta()
        u = np.asarray(wprime, dtype=complex) - np.asarray(z, dtype=complex)
        ubar = np.conj(np.asarray(w, dtype=complex)) - np.conj(np.asarray(zprime, dtype=complex))
        val = np.broadcast_to(self.evaluate_jet(j, lookup, u, ubar), np.broadcast(u, ubar).shape)
        return val if val.ndim else complex(val)

    def evaluate(self, j: int, P: HermitianPotential, z, w):
        return self.lift(j, P, z, z, w, w)


@lru_cache(maxsize=None)
def _solved_q1(j_max: int) -> Tuple[CoeffExpr, ...]:
    return tuple(solve_expansion_q1(j_max))


@lru_cache(maxsize=None)
def _solved_q2(j_max: int) -> Tuple[BianalyticCoeffs, ...]:
    return tuple(solve_expansion_q2(j_max))


def coefficient_set(q: int, max_order: Optional[int] = None, origin: str = 'printed') -> ExpansionCoefficientSet:
    """
    Набор коэффициентов для q = 1 или q = 2.

    Args:
        q: 1 или 2
        max_order: Старший порядок (по умолчанию максимальный доступный)
        origin: 'printed' - явные формулы, 'solved' - вывод символьного решателя

    Raises:
        ValidationError: ORDER_UNAVAILABLE
    """
    cfg = ACTIVE_CONFIG.get_config('JETCAS_CONFIG')
    if q == 1:
        top = cfg['max_q1_order'] if max_order is None else max_order
        if not 0 <= top <= cfg['max_q1_order']:
            raise_for(ErrorCode.ORDER_UNAVAILABLE, "порядок для q=1 недоступен", order=top)
        # явные формулы известны для j <= 1, старшие порядки - только решателем
        if origin == 'printed' and top <= 1:
            coeffs = [CoeffExpr.beta() * 2, _log_beta_half()][:top + 1]
        else:
            coeffs = list(_solved_q1(top))
            origin = 'solved'
        return ExpansionCoefficientSet(1, coeffs, origin)
    if q == 2:
        top = cfg['max_q2_order'] if max_order is None else max_order
        if not 0 <= top <= cfg['max_q2_order']:
            raise_for(ErrorCode.ORDER_UNAVAILABLE, "порядок для q=2 недоступен", order=top)
        if origin == 'printed':
            coeffs = [printed_q2(j) for j in range(top + 1)]
        else:
            coeffs = list(_solved_q2(top))
        return ExpansionCoefficientSet(2, coeffs, origin)
    raise_for(ErrorCode.ORDER_UNAVAILABLE, "разложение реализовано только для q = 1, 2", q=q)


def _log_beta_half() -> CoeffExpr:
    """π·L₁ = ½ ∂_z∂̄_w log β"""
    b11, b21, b12 = CoeffExpr.symbol(2, 2), CoeffExpr.symbol(2, 1), CoeffExpr.symbol(1, 2)
    return (b11.div_beta(1) - (b21 * b12).div_beta(2)) / 2


# ==================== КОЭФФИЦИЕНТЫ L^q_j ====================

def eval_L1(P: HermitianPotential, z, w, j: int):
    """
    Коэффициент L_j для q = 1.

    j = 0: (2/π)β(z,w); j = 1: (1/2π)(β_{1,1}/β - β_{1,0}β_{0,1}/β²);
    j = 2, 3 вычисляются по выводу решателя.

    Raises:
        NumericalError: BETA_ZERO
        ValidationError: ORDER_UNAVAILABLE
    """
    return coefficient_set(1, max(j, 1)).evaluate(j, P, z, w)


def eval_L2(P: HermitianPotential, z, w, j: int):
    """
    Коэффициент L²_j (j = 0, 1, 2) по явным формулам.

    Raises:
        NumericalError: BETA_ZERO
        ValidationError: ORDER_UNAVAILABLE
    """
    return coefficient_set(2, j).evaluate(j, P, z, w)


def _max_order(q: int, k: int) -> int:
    """K^⟨k⟩ использует порядки j <= k + q - 1 (степени m^q .. m^{1-k})"""
    cfg = ACTIVE_CONFIG.get_config('JETCAS_CONFIG')
    top = k + q - 1
    limit = {1: cfg['max_q1_order'], 2: cfg['max_q2_order']}.get(q)
    if limit is None or k < 0 or top > limit:
        raise_for(ErrorCode.ORDER_UNAVAILABLE, "приближение данного порядка недоступно", q=q, k=k)
    return top


def approx_lift(P: HermitianPotential, m: float, q: int, k: int, z, zprime, w, wprime,
                origin: str = 'printed'):
    """
    Подъем E⊗2[K^⟨k⟩](z, z'; w, w') = Σ_j m^{q-j} E⊗2[L^q_j] · e^{2mQ(z,w)}.

    origin выбирает явные формулы или вывод решателя (см. coefficient_set).
    """
    top = _max_order(q, k)
    coeffs = coefficient_set(q, top, origin)
    total = 0j
    for j in range(top + 1):
        total = total + m ** (q - j) * np.asarray(coeffs.lift(j, P, z, zprime, w, wprime))
    val = np.asarray(total * np.exp(2.0 * m * np.asarray(eval_polarized(P, z, w))))
    return val if val.ndim else complex(val)


def approx_kernel(P: HermitianPotential, m: float, q: int, k: int, z, w, origin: str = 'printed'):
    """
    Приближенное ядро K^⟨k⟩(z,w) = (Σ_{j<=k+q-1} m^{q-j} L^q_j(z,w)) e^{2mQ(z,w)}.

    Raises:
        ValidationError: ORDER_UNAVAILABLE (q = 1: k <= 3; q = 2: k <= 1)
    """
    return approx_lift(P, m, q, k, z, z, w, w, origin)


def initial_local_kernel(P: HermitianPotential, m: float, q: int, z, w):
    """
    Нескорректированные локальные ядра:
    q = 1: (2m/π) ∂̄_wθ e^{2mQ(z,w)};
    q = 2: [-(4m²/π)|z-w|²(∂̄_wθ)² + (4m/π)∂̄_wθ - (2m/π)(z̄-w̄)∂̄²_wθ] e^{2mQ(z,w)}.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d1 = np.asarray(dbar_theta(P, z, w))
    phase = np.exp(2.0 * m * np.asarray(eval_polarized(P, z, w)))
    if q == 1:
        amp = (2.0 * m / np.pi) * d1
    elif q == 2:
        d2 = np.asarray(dbar2_theta(P, z, w))
        amp = (-(4.0 * m ** 2 / np.pi) * np.abs(z - w) ** 2 * d1 ** 2 + (4.0 * m / np.pi) * d1
               - (2.0 * m / np.pi) * (np.conj(z) - np.conj(w)) * d2)
    else:
        raise_for(ErrorCode.ORDER_UNAVAILABLE, "локальные ядра определены для q = 1, 2", q=q)
    val = amp * phase
    return val if val.ndim else complex(val)


def near_diagonal(P: HermitianPotential, m: float, z, w, factor: Optional[float] = None) -> np.ndarray:
    """|z - w| <= factor / sqrt(2m ΔQ(z))"""
    factor = factor or ACTIVE_CONFIG.get_config('STUDY_CONFIG')['near_diagonal_factor']
    scale = 1.0 / np.sqrt(2.0 * m * np.asarray(laplacian(P, z)))
    return np.abs(np.asarray(z) - np.asarray(w)) <= factor * scale


# ==================== РАЗДУТИЕ ====================

def blowup_lhs(source, P: HermitianPotential, m: float, z0: complex, xi, eta, signed: bool = False):
    """
    Нормированное ядро в растянутых координатах:
    (1/(2mΔQ(z0))) |K(z0 + ξ', z0 + η')| e^{-mQ(z0+ξ') - mQ(z0+η')}, ξ' = ξ/√(2mΔQ(z0)).

    При signed фаза e^{2im Im Q(z,w)} снимается и берется вещественная часть.

    Raises:
        ValidationError: FAILS_POSITIVITY при ΔQ(z0) <= 0
    """
    dq = laplacian(P, z0)
    if not dq > 0:
        raise_for(ErrorCode.FAILS_POSITIVITY, "ΔQ(z0) <= 0", z0=str(z0))
    scale = np.sqrt(2.0 * m * dq)
    z = z0 + np.asarray(xi, dtype=complex) / scale
    w = z0 + np.asarray(eta, dtype=complex) / scale
    k = np.asarray(source.eval(z, w))
    damp = np.exp(-m * (np.asarray(eval_potential(P, z)) + np.asarray(eval_potential(P, w))))
    if signed:
        gauge = np.exp(-2j * m * np.imag(np.asarray(eval_polarized(P, z, w))))
        val = np.real(k * gauge) * damp / (2.0 * m * dq)
    else:
        val = np.abs(k) * damp / (2.0 * m * dq)
    return val if val.ndim else float(val)


def default_blowup_grid(radius: float = 2.0, count: int = 9) -> List[Tuple[complex, complex]]:
    """Пары (0, η) с |η| от 0 до radius и поворотом на π/4 на каждом шаге"""
    return [(0j, (radius * i / (count - 1)) * np.exp(1j * np.pi * i / 4)) for i in range(count)]


@dataclass
class BlowupStudy:
    """Результат исследования ошибки раздутия"""
    z0: complex
    rows: List[Dict[str, Any]]
    slope: Optional[float]
    slope_in_band: Optional[bool]
    flags: List[str] = field(default_factory=list)

    @property
    def errors(self) -> List[float]:
        return [r['sup_error'] for r in self.rows]

    @property
    def strictly_decreasing(self) -> bool:
        errs = self.errors
        return all(b < a for a, b in zip(errs, errs[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'z0': [self.z0.real, self.z0.imag],
            'rows': self.rows,
            'slope': self.slope,
            'slope_in_band': self.slope_in_band,
            'strictly_decreasing': self.strictly_decreasing,
            'flags': list(self.flags)
        }


def fit_slope(ms: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """Наклон МНК log(error) от log(m); None, если точек меньше двух или есть нулевые ошибки"""
    ms = np.asarray(ms, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ms.size < 2 or np.any(errors <= 0):
        return None
    return float(np.polyfit(np.log(ms), np.log(errors), 1)[0])


def blowup_error_study(source_for_m: Callable[[float], Any], P: HermitianPotential, z0: complex,
                       grid: Sequence[Tuple[complex, complex]], m_list: Sequence[float],
                       signed: bool = False, threads: int = 1, exact_tol: float = 1e-10) -> BlowupStudy:
    """
    Супремум по сетке |blowup_lhs - предельное ядро| для каждого m и наклон в log-log масштабе.

    Для источников с измеренным n-уточнением строка хранит n и n_refinement_delta;
    точка, где delta >= truncation_ratio * sup_error, помечается флагом truncation_dominated.

    Args:
        source_for_m: Функция m -> источник ядра с методом eval(z, w)
        grid: Пары (ξ, η)
        m_list: Возрастающий список m
        signed: Сравнивать знаковые варианты

    Returns:
        BlowupStudy; при одном m наклон не вычисляется и выставляется флаг single_m
    """
    m_list = list(m_list)
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise_for(ErrorCode.CONFIG_INVALID, "m_list должен возрастать", m_list=m_list)
    xi = np.array([p[0] for p in grid], dtype=complex)
    eta = np.array([p[1] for p in grid], dtype=complex)
    limit_fn = limit_blowup_kernel_signed if signed else limit_blowup_kernel
    limit = np.asarray(limit_fn(xi, eta))
    study_cfg = ACTIVE_CONFIG.get_config('STUDY_CONFIG')

    def one(m: float) -> Tuple[float, Optional[int], Optional[float]]:
        source = source_for_m(m)
        lhs = np.asarray(blowup_lhs(source, P, m, z0, xi, eta, signed=signed))
        return (float(np.max(np.abs(lhs - limit))), getattr(source, 'n', None),
                getattr(source, 'n_refinement_delta', None))

    results = parallel_map(one, m_list, threads=threads)
    sup_errors = [r[0] for r in results]
    rows = []
    for i, (m, (err, n, delta)) in enumerate(zip(m_list, results)):
        truncation_ok = None
        if delta is not None and err > exact_tol:
            truncation_ok = bool(delta < study_cfg['truncation_ratio'] * err)
        rows.append({'m': float(m), 'sup_error': err,
                     'slope_so_far': fit_slope(m_list[:i + 1], sup_errors[:i + 1]),
                     'n': n, 'n_refinement_delta': delta, 'truncation_ok': truncation_ok})

    flags = []
    slope = fit_slope(m_list, sup_errors)
    if len(m_list) < 2:
        flags.append('single_m')
        logger.warning("blowup_slope_omitted reason=single_m z0=%s", z0)
    elif all(e <= exact_tol for e in sup_errors):
        flags.append('exact')
        slope = None
    if any(r['truncation_ok'] is False for r in rows):
        flags.append('truncation_dominated')
        logger.warning("blowup_truncation_dominated z0=%s m=%s", z0,
                       [r['m'] for r in rows if r['truncation_ok'] is False])
    band = study_cfg['slope_band']
    in_band = None if slope is None else bool(band[0] <= slope <= band[1])
    logger.info("blowup_study z0=%s m_count=%d slope=%s in_band=%s", z0, len(m_list), slope, in_band)
    return BlowupStudy(complex(z0), rows, slope, in_band, flags)
