"""
Полианалитические ядра Бергмана полным перебором: ортонормализация
матрицы Грама бистепенного мономиального базиса z̄^r z^j.

Модуль служит универсальным эталоном для всех остальных способов вычисления ядра.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh, solve_triangular
from scipy.linalg.lapack import zpotrf
from scipy.special import logsumexp, roots_legendre

from src.config.kernel_config import ACTIVE_CONFIG
from src.models.errors import ErrorCode, raise_for
from src.models.potential import DomainSpec, HermitianPotential, eval_potential
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

LOG_PI = float(np.log(np.pi))


@dataclass(frozen=True)
class BasisSpec:
    """
    Базис z̄^r z^j, 0 <= r < q, 0 <= j < n (размер q·n).

    При radial_blocking базис разбивается на блоки по угловому индексу l = j - r.
    """
    q: int
    n: int
    radial_blocking: bool = True

    def __post_init__(self):
        if self.q < 1 or self.n < 1:
            raise_for(ErrorCode.CONFIG_INVALID, "q и n должны быть >= 1", q=self.q, n=self.n)

    @property
    def size(self) -> int:
        return self.q * self.n

    @property
    def indices(self) -> List[Tuple[int, int]]:
        """Пары (r, j) в порядке r-major"""
        return [(r, j) for r in range(self.q) for j in range(self.n)]

    def blocks(self) -> List[np.ndarray]:
        """Списки номеров базисных элементов для каждого углового блока"""
        idx = self.indices
        groups: Dict[int, List[int]] = {}
        for pos, (r, j) in enumerate(idx):
            groups.setdefault(j - r, []).append(pos)
        return [np.array(groups[key], dtype=int) for key in sorted(groups)]


@dataclass(frozen=True)
class QuadratureSpec:
    """Параметры квадратур для сборки матрицы Грама"""
    radial_nodes: int = 256
    max_doublings: int = 4
    rel_tol: float = 1e-10
    tensor_radial_nodes: int = 128
    tensor_angular_nodes: int = 256
    tail_tolerance: float = 1e-30

    @classmethod
    def from_config(cls, config=None) -> 'QuadratureSpec':
        cfg = (config or ACTIVE_CONFIG).get_config('GRAM_CONFIG')
        return cls(
            radial_nodes=cfg['radial_nodes'],
            max_doublings=cfg['max_node_doublings'],
            rel_tol=cfg['quadrature_rel_tol'],
            tensor_radial_nodes=cfg['tensor_radial_nodes'],
            tensor_angular_nodes=cfg['tensor_angular_nodes'],
            tail_tolerance=cfg['tail_tolerance']
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'radial_nodes': self.radial_nodes,
            'max_doublings': self.max_doublings,
            'rel_tol': self.rel_tol,
            'tensor_radial_nodes': self.tensor_radial_nodes,
            'tensor_angular_nodes': self.tensor_angular_nodes,
            'tail_tolerance': self.tail_tolerance
        }


@dataclass
class GramKernel:
    """
    Ортонормализованный конечномерный ядерный вычислитель с поддержкой подъема.

    Для каждого блока хранится преобразование T (треугольный фактор
    Холецкого или отбеливающая матрица), такое что K = <T b(w), T b(z)>.
    """
    basis: BasisSpec
    domain: DomainSpec
    potential: Optional[HermitianPotential]
    m: Optional[float]
    blocks: List[np.ndarray]
    factors: List[np.ndarray]
    kinds: List[str]
    log_norms: np.ndarray
    condition_estimate: float
    quadrature: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def ill_conditioned(self) -> bool:
        return ErrorCode.ILL_CONDITIONED.label in self.warnings

    def _check_points(self, *points):
        if self.domain.kind != 'disk':
            return
        center = complex(self.domain.center)
        for p in points:
            if np.any(np.abs(np.asarray(p, dtype=complex) - center) >= self.domain.radius):
                raise_for(ErrorCode.OUT_OF_DOMAIN, "точка вне области ядра")

    def _basis_values(self, z: np.ndarray, zprime: np.ndarray) -> np.ndarray:
        """Масштабированные значения E[b_i](z, z') = conj(z')^r z^j e^{-d_i}, форма (size, P)"""
        zbar = np.conj(zprime)
        rows = [zbar ** r * z ** j for r, j in self.basis.indices]
        vals = np.vstack(rows) if rows else np.zeros((0, z.size), dtype=complex)
        return vals * np.exp(-self.log_norms)[:, None]

    def _transformed(self, z: np.ndarray, zprime: np.ndarray) -> List[np.ndarray]:
        vals = self._basis_values(z, zprime)
        out = []
        for idx, factor, kind in zip(self.blocks, self.factors, self.kinds):
            b = vals[idx]
            if kind == 'cholesky':
                out.append(solve_triangular(factor, b, lower=True))
            else:
                out.append(factor @ b)
        return out

    def lift(self, z, zprime, w, wprime):
        """
        Подъем E⊗2[K](z, z'; w, w'): z̄ заменяется на z̄' в первом аргументе,
        w на w' в сопряженном.

        Raises:
            ValidationError: OUT_OF_DOMAIN
        """
        self._check_points(z, w)
        z, zprime, w, wprime = np.broadcast_arrays(*(np.asarray(p, dtype=complex) for p in (z, zprime, w, wprime)))
        shape = z.shape
        xs = self._transformed(z.ravel(), zprime.ravel())
        ys = self._transformed(w.ravel(), wprime.ravel())
        total = np.zeros(z.size, dtype=complex)
        for x, y in zip(xs, ys):
            total += np.sum(np.conj(y) * x, axis=0)
        total = total.reshape(shape)
        return total if total.ndim else complex(total)

    def eval(self, z, w):
        """K(z, w) = b(w)^H G^{-1} b(z)"""
        return self.lift(z, z, w, w)

    def diag(self, z):
        """Диагональ K(z, z) (вещественная)"""
        val = np.real(np.asarray(self.eval(z, z)))
        return val if val.ndim else float(val)

    def weight(self, z):
        """Вес области ω(z): e^{-2mQ(z)} или 1/π для модельного диска"""
        if self.m is None or self.potential is None:
            val = np.full(np.shape(z), 1.0 / np.pi)
        else:
            val = np.exp(-2.0 * self.m * np.asarray(eval_potential(self.potential, z)))
        return val if np.ndim(val) else float(val)


# ==================== МАТРИЦЫ ГРАМА ====================

def inner_products_disk_constant(q: int, n: int) -> List[List[Fraction]]:
    """
    Точные скалярные произведения в единичном диске с весом 1/π:
    <z̄^r z^j, z̄^s z^k> = [j+s = r+k] / (j+s+1).

    Returns:
        Матрица (q·n)×(q·n) рациональных чисел в порядке BasisSpec.indices
    """
    idx = BasisSpec(q, n).indices
    gram = []
    for r, j in idx:
        row = []
        for s, k in idx:
            row.append(Fraction(1, j + s + 1) if j + s == r + k else Fraction(0))
        gram.append(row)
    return gram


def _log_integrand(P: Optional[HermitianPotential], m: Optional[float], rho: np.ndarray) -> np.ndarray:
    """log весовой функции вдоль радиуса"""
    if m is None or P is None:
        return np.full(rho.shape, -LOG_PI)
    return -2.0 * m * np.asarray(eval_potential(P, rho.astype(complex)))


def plane_truncation_radius(P: HermitianPotential, m: float, q: int, n: int,
                            tail_tolerance: float = 1e-30) -> float:
    """
    Радиус усечения R для плоскости: e^{-2mQ(R)} R^{2(n+q)} ниже доли tail_tolerance
    от наибольшего значения подынтегрального выражения старшего момента.
    """
    power = 2 * (n + q) + 1
    log_tail = -np.log(tail_tolerance)
    angles = np.linspace(0.0, 2 * np.pi, 32, endpoint=False)

    def log_f(rho: np.ndarray) -> np.ndarray:
        pts = rho[:, None] * np.exp(1j * angles[None, :])
        q_min = np.min(np.asarray(eval_potential(P, pts)), axis=1)
        return power * np.log(rho) - 2.0 * m * q_min

    radius = 1.0
    for _ in range(200):
        grid = np.linspace(radius * 1e-3, radius, 4000)
        values = log_f(grid)
        tail_ok = values[-1] < values.max() - log_tail
        decreasing = values[-1] < values[-2]
        if tail_ok and decreasing:
            return float(radius)
        radius *= 1.25
    raise_for(ErrorCode.QUADRATURE_UNCONVERGED, "не удалось подобрать радиус усечения: вес не убывает",
              last_radius=radius)


def _legendre(nodes: int, upper: float) -> Tuple[np.ndarray, np.ndarray]:
    x, wts = roots_legendre(nodes)
    return upper * (x + 1.0) / 2.0, wts * upper / 2.0


def radial_log_moments(P: Optional[HermitianPotential], m: Optional[float], max_power: int,
                       radius: float, quad: QuadratureSpec) -> Tuple[np.ndarray, int]:
    """
    Логарифмы моментов M_p = 2π ∫_0^R ρ^{p+1} ω(ρ) dρ, p = 0..max_power.

    Число узлов удваивается, пока относительное изменение каждого момента
    не станет меньше quad.rel_tol.

    Returns:
        (log M_p, использованное число узлов)

    Raises:
        NumericalError: QUADRATURE_UNCONVERGED
    """
    powers = np.arange(max_power + 1)

    def compute(nodes: int) -> np.ndarray:
        rho, wts = _legendre(nodes, radius)
        logw = np.log(wts) + _log_integrand(P, m, rho)
        terms = (powers[:, None] + 1) * np.log(rho)[None, :] + logw[None, :]
        return np.log(2 * np.pi) + logsumexp(terms, axis=1)

    nodes = quad.radial_nodes
    current = compute(nodes)
    for _ in range(quad.max_doublings):
        refined = compute(2 * nodes)
        change = np.max(np.abs(np.expm1(refined - current)))
        if change <= quad.rel_tol:
            return current, nodes
        logger.warning("quadrature_doubled nodes=%d rel_change=%.3e", 2 * nodes, change)
        nodes *= 2
        current = refined
    raise_for(ErrorCode.QUADRATURE_UNCONVERGED, "квадратура не сошлась при удвоении узлов",
              nodes=nodes, tolerance=quad.rel_tol)


def _scaled_from_log_moments(log_moments: np.ndarray, spec: BasisSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Матрица Грама с единичной диагональю и вектор log-норм d_i = ½ log G_ii"""
    idx = spec.indices
    size = len(idx)
    log_norms = np.array([0.5 * log_moments[2 * (r + j)] for r, j in idx])
    gram = np.zeros((size, size), dtype=complex)
    for a, (r, j) in enumerate(idx):
        for b, (s, k) in enumerate(idx):
            if j - r == k - s:
                gram[a, b] = np.exp(log_moments[j + s + r + k] - log_norms[a] - log_norms[b])
    return gram, log_norms


def inner_products_radial(P: Optional[HermitianPotential], m: Optional[float], q: int, n: int,
                          quad: QuadratureSpec, radius: Optional[float] = None) -> np.ndarray:
    """
    Матрица Грама для радиального веса:
    <z̄^r z^j, z̄^s z^k> = [j-r = k-s] 2π ∫_0^R ρ^{j+s+r+k+1} e^{-2mQ(ρ)} dρ.

    Args:
        P: Радиальный потенциал (None для постоянного веса 1/π)
        m: Показатель веса
        q, n: Размер базиса
        quad: Параметры квадратуры
        radius: Верхний предел; для плоскости подбирается автоматически

    Returns:
        Комплексная матрица (q·n)×(q·n) без масштабирования
    """
    if P is not None and not P.is_radial:
        raise_for(ErrorCode.CONFIG_INVALID, "радиальная сборка требует радиального потенциала")
    if radius is None:
        radius = plane_truncation_radius(P, m, q, n, quad.tail_tolerance)
    spec = BasisSpec(q, n)
    log_moments, _ = radial_log_moments(P, m, 2 * (n - 1) + 2 * (q - 1), radius, quad)
    gram, log_norms = _scaled_from_log_moments(log_moments, spec)
    scale = np.exp(log_norms)
    return gram * scale[:, None] * scale[None, :]


def inner_products_tensor(P: Optional[HermitianPotential], m: Optional[float], spec: BasisSpec,
                          center: complex, radius: float, quad: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Матрица Грама на полярной тензорной сетке вокруг center (нерадиальный вес
    или смещенный диск). Возвращает масштабированную матрицу и log-нормы.
    """
    rho, wr = _legendre(quad.tensor_radial_nodes, radius)
    n_ang = quad.tensor_angular_nodes
    phi = 2 * np.pi * np.arange(n_ang) / n_ang
    pts = (complex(center) + rho[:, None] * np.exp(1j * phi[None, :])).ravel()
    logw = (np.log(rho * wr)[:, None] + np.log(2 * np.pi / n_ang) + np.zeros((1, n_ang))).ravel()
    if m is None or P is None:
        logw = logw - LOG_PI
    else:
        logw = logw - 2.0 * m * np.asarray(eval_potential(P, pts))
    shift = float(logw.max())
    wts = np.exp(logw - shift)
    basis_vals = np.vstack([np.conj(pts) ** r * pts ** j for r, j in spec.indices])
    raw = (basis_vals * wts[None, :]) @ basis_vals.conj().T
    diag = np.real(np.diag(raw))
    if np.any(diag <= 0):
        raise_for(ErrorCode.NOT_POSITIVE_DEFINITE, "нулевая норма базисного элемента на сетке",
                  pivot=int(np.argmin(diag)))
    log_norms = 0.5 * (np.log(diag) + shift)
    inv = 1.0 / np.sqrt(diag)
    return raw * inv[:, None] * inv[None, :], log_norms


# ==================== ФАКТОРИЗАЦИЯ ====================

def _factor_block(gram: np.ndarray, offset: np.ndarray, eigen_floor: float) -> Tuple[np.ndarray, str, float]:
    """
    Холецкий через LAPACK zpotrf; при отказе - отбеливание через eigh.

    Returns:
        (фактор, вид 'cholesky'|'eigh', оценка числа обусловленности)
    """
    gram = 0.5 * (gram + gram.conj().T)
    cond = float(np.linalg.cond(gram)) if gram.shape[0] > 0 else 1.0
    chol, info = zpotrf(gram, lower=1, clean=1)
    if info == 0:
        return np.tril(chol), 'cholesky', cond
    pivot = int(offset[info - 1]) if info > 0 else -1
    logger.warning("cholesky_failed pivot=%d fallback=eigh", pivot)
    vals, vecs = eigh(gram)
    top = float(np.max(np.abs(vals))) if vals.size else 1.0
    if vals.min() < -eigen_floor * max(top, 1.0) * gram.shape[0]:
        raise_for(ErrorCode.NOT_POSITIVE_DEFINITE, "матрица Грама не положительно определена",
                  pivot=pivot, min_eigenvalue=float(vals.min()))
    keep = vals > eigen_floor * top
    whitening = (vecs[:, keep] / np.sqrt(vals[keep])[None, :]).conj().T
    return whitening, 'eigh', float(top / vals[keep].min())


def gram_kernel_build(domain: DomainSpec, P: Optional[HermitianPotential], m: Optional[float],
                      spec: BasisSpec, quad: Optional[QuadratureSpec] = None, threads: int = 1,
                      cache=None, config=None) -> GramKernel:
    """
    Строит GramKernel: собирает матрицу Грама, масштабирует к единичной
    диагонали, факторизует поблочно.

    Args:
        domain: Область (модельный диск, диск с весом или плоскость)
        P: Потенциал (None для модельного диска)
        m: Показатель веса (None для модельного диска)
        spec: Базис
        quad: Параметры квадратур
        threads: Число потоков для факторизации блоков
        cache: Необязательный GramCache
        config: Класс конфигурации (по умолчанию ACTIVE_CONFIG)

    Returns:
        GramKernel

    Raises:
        NumericalError: NOT_POSITIVE_DEFINITE, QUADRATURE_UNCONVERGED
    """
    config = config or ACTIVE_CONFIG
    gram_cfg = config.get_config('GRAM_CONFIG')
    quad = quad or QuadratureSpec.from_config(config)
    if m is None and domain.m is not None:
        m = domain.m
    model = m is None or P is None
    if not model and not m > 0:
        raise_for(ErrorCode.CONFIG_INVALID, "m должно быть > 0", m=m)

    key_header = {
        'potential': P.to_dict() if P is not None else None,
        'domain': domain.to_dict(),
        'm': m,
        'q': spec.q,
        'n': spec.n,
        'radial_blocking': spec.radial_blocking,
        'quadrature': quad.to_dict()
    }
    if cache is not None:
        cached = cache.load(key_header)
        if cached is not None:
            logger.info("gram_cache_hit q=%d n=%d", spec.q, spec.n)
            return _from_payload(cached, spec, domain, P, m)

    centered = abs(complex(domain.center)) == 0.0 or domain.kind == 'plane'
    radial = centered and (model or P.is_radial)
    meta: Dict[str, Any] = {'method': None}

    if domain.kind == 'disk':
        radius = domain.radius
    elif domain.truncation_radius is not None:
        radius = domain.truncation_radius
    else:
        if model:
            raise_for(ErrorCode.CONFIG_INVALID, "плоскость требует весовой потенциал")
        radius = plane_truncation_radius(P, m, spec.q, spec.n, quad.tail_tolerance)
    meta['radius'] = radius

    if model and domain.kind == 'disk' and radius == 1.0 and centered:
        exact = inner_products_disk_constant(spec.q, spec.n)
        diag = np.array([float(exact[i][i]) for i in range(spec.size)])
        log_norms = 0.5 * np.log(diag)
        gram = np.array([[float(v) for v in row] for row in exact], dtype=complex)
        gram = gram / np.sqrt(diag)[:, None] / np.sqrt(diag)[None, :]
        meta['method'] = 'exact_rational'
    elif radial:
        log_moments, nodes = radial_log_moments(P, m, 2 * (spec.n - 1) + 2 * (spec.q - 1), radius, quad)
        gram, log_norms = _scaled_from_log_moments(log_moments, spec)
        meta['method'] = 'radial_gauss_legendre'
        meta['radial_nodes'] = nodes
    else:
        gram, log_norms = inner_products_tensor(P, m, spec, domain.center, radius, quad)
        meta['method'] = 'polar_tensor'
        meta['tensor_nodes'] = [quad.tensor_radial_nodes, quad.tensor_angular_nodes]

    if spec.radial_blocking and (radial or meta['method'] == 'exact_rational'):
        blocks = spec.blocks()
    else:
        blocks = [np.arange(spec.size)]

    def factor(idx: np.ndarray):
        return _factor_block(gram[np.ix_(idx, idx)], idx, gram_cfg['eigen_floor'])

    results = parallel_map(factor, blocks, threads)
    factors = [res[0] for res in results]
    kinds = [res[1] for res in results]
    condition = max(res[2] for res in results)

    warnings: List[str] = []
    if condition > gram_cfg['ill_conditioned_threshold']:
        warnings.append(ErrorCode.ILL_CONDITIONED.label)
        logger.warning("ill_conditioned condition=%.3e q=%d n=%d", condition, spec.q, spec.n)

    kernel = GramKernel(
        basis=spec, domain=domain, potential=P, m=m, blocks=blocks, factors=factors, kinds=kinds,
        log_norms=log_norms, condition_estimate=condition, quadrature=meta, warnings=warnings
    )
    logger.info("gram_built q=%d n=%d method=%s blocks=%d condition=%.3e",
                spec.q, spec.n, meta['method'], len(blocks), condition)
    if cache is not None:
        cache.store(key_header, _to_payload(kernel))
    return kernel


def _to_payload(kernel: GramKernel) -> Dict[str, np.ndarray]:
    payload: Dict[str, np.ndarray] = {
        'log_norms': kernel.log_norms,
        'condition': np.array([kernel.condition_estimate]),
        'kinds': np.array(kernel.kinds),
        'warnings': np.array(kernel.warnings, dtype=str),
        'radius': np.array([kernel.quadrature.get('radius', np.nan)]),
        'method': np.array([kernel.quadrature.get('method') or ''])
    }
    for i, (idx, factor) in enumerate(zip(kernel.blocks, kernel.factors)):
        payload[f'block_{i}_idx'] = idx
        payload[f'block_{i}_factor'] = np.ascontiguousarray(factor)
    return payload


def _from_payload(payload: Dict[str, np.ndarray], spec: BasisSpec, domain: DomainSpec,
                  P: Optional[HermitianPotential], m: Optional[float]) -> GramKernel:
    kinds = [str(k) for k in payload['kinds']]
    blocks = [payload[f'block_{i}_idx'] for i in range(len(kinds))]
    factors = [payload[f'block_{i}_factor'] for i in range(len(kinds))]
    return GramKernel(
        basis=spec, domain=domain, potential=P, m=m, blocks=blocks, factors=factors, kinds=kinds,
        log_norms=payload['log_norms'], condition_estimate=float(payload['condition'][0]),
        quadrature={'method': str(payload['method'][0]), 'radius': float(payload['radius'][0]), 'cached': True},
        warnings=[str(w) for w in payload['warnings']]
    )


# ==================== ПРОТОКОЛ УТОЧНЕНИЯ ПО n ====================

def n_refinement_delta(domain: DomainSpec, P: Optional[HermitianPotential], m: Optional[float],
                       spec: BasisSpec, points: List[Tuple[complex, complex]], step: int = 10,
                       quad: Optional[QuadratureSpec] = None, cache=None, config=None) -> float:
    """
    Максимальное относительное изменение K(z,w) при n -> n + step на заданных парах.

    Позволяет отделить ошибку усечения базиса от ошибки асимптотики.
    """
    coarse = gram_kernel_build(domain, P, m, spec, quad=quad, cache=cache, config=config)
    fine = gram_kernel_build(domain, P, m, BasisSpec(spec.q, spec.n + step, spec.radial_blocking),
                             quad=quad, cache=cache, config=config)
    z = np.array([p[0] for p in points], dtype=complex)
    w = np.array([p[1] for p in points], dtype=complex)
    a = np.asarray(coarse.eval(z, w))
    b = np.asarray(fine.eval(z, w))
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)))


def choose_n(domain: DomainSpec, P: Optional[HermitianPotential], m: Optional[float], q: int,
             points: List[Tuple[complex, complex]], target: float, n0: Optional[int] = None,
             config=None, quad: Optional[QuadratureSpec] = None, cache=None) -> Tuple[int, float]:
    """
    Подбирает n, при котором n-уточнение меняет ядро не более чем на target.

    Returns:
        (n, достигнутое относительное изменение)
    """
    cfg = (config or ACTIVE_CONFIG).get_config('GRAM_CONFIG')
    n = n0 or cfg['default_n']
    step = cfg['refinement_step']
    delta = np.inf
    while n <= cfg['max_n']:
        delta = n_refinement_delta(domain, P, m, BasisSpec(q, n, cfg['radial_blocking']), points,
                                   step=step, quad=quad, cache=cache, config=config)
        if delta <= target:
            return n, delta
        n += step
    logger.warning("n_refinement_not_reached target=%.3e delta=%.3e n=%d", target, delta, n - step)
    return n - step, delta


# ==================== КОРРЕЛЯЦИОННОЕ ЯДРО ====================

def correlation_kernel(source, P: HermitianPotential, m: float, z, w):
    """
    Корреляционное ядро K(z,w) e^{-m(Q(z)+Q(w))}.

    Args:
        source: Объект с методом eval(z, w) или вызываемый объект (z, w) -> K
    """
    evaluator = getattr(source, 'eval', source)
    k = np.asarray(evaluator(z, w))
    damp = np.exp(-m * (np.asarray(eval_potential(P, z)) + np.asarray(eval_potential(P, w))))
    val = k * damp
    return val if np.ndim(val) else complex(val)
