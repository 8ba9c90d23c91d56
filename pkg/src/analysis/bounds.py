"""
Оценки точечных значений бианалитических функций в весовых пространствах
и рандомизированная проверка всех неравенств.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import roots_legendre

from src.analysis.closedform import gaussian_poly_kernel
from src.config.kernel_config import ACTIVE_CONFIG
from src.models.errors import ErrorCode, raise_for
from src.models.potential import HermitianPotential, eval_potential, laplacian, polar_grid
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

Pair = Tuple[float, float]


# ==================== ТЕСТОВЫЕ ФУНКЦИИ ====================

@dataclass(frozen=True)
class BianalyticTestFn:
    """
    u(z) = u₁(z) + c z̄ + |z|² u₂(z), u₁, u₂ - голоморфные многочлены
    (коэффициенты по возрастанию степеней).
    """
    u1: Tuple[complex, ...] = (0j,)
    u2: Tuple[complex, ...] = (0j,)
    c: complex = 0j

    @classmethod
    def random(cls, rng: np.random.Generator, max_degree: int = 6, coeff_bound: float = 1.0,
               holomorphic: bool = False) -> 'BianalyticTestFn':
        def poly():
            deg = int(rng.integers(0, max_degree + 1))
            return tuple(coeff_bound * (rng.uniform(-1, 1, deg + 1) + 1j * rng.uniform(-1, 1, deg + 1)))
        if holomorphic:
            return cls(poly(), (0j,), 0j)
        c = coeff_bound * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        return cls(poly(), poly(), c)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = (np.polynomial.polynomial.polyval(z, self.u1) + self.c * np.conj(z)
               + np.abs(z) ** 2 * np.polynomial.polynomial.polyval(z, self.u2))
        return val if val.ndim else complex(val)

    def dbar(self, z):
        """∂̄u = c + z u₂(z)"""
        z = np.asarray(z, dtype=complex)
        val = self.c + z * np.polynomial.polynomial.polyval(z, self.u2)
        return val if val.ndim else complex(val)


@dataclass(frozen=True)
class SubharmonicRadialPsi:
    """
    ψ(z) = const + a|z|² + b|z|⁴ (a, b >= 0), либо произвольный радиальный профиль
    с проверкой субгармоничности на сетке.
    """
    a: float = 0.0
    b: float = 0.0
    const: float = 0.0
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.profile is None and (self.a < 0 or self.b < 0):
            raise_for(ErrorCode.CONFIG_INVALID, "семейство ψ требует a, b >= 0", a=self.a, b=self.b)
        if self.profile is not None and not self.check_subharmonic():
            logger.warning("psi_subharmonicity_violated profile=custom")

    @classmethod
    def random(cls, rng: np.random.Generator, nonpositive: bool = False) -> 'SubharmonicRadialPsi':
        a, b = rng.uniform(0, 2), rng.uniform(0, 1)
        const = -(a + b) - rng.uniform(0, 1) if nonpositive else rng.uniform(-1, 1)
        return cls(a, b, const)

    def __call__(self, z):
        rho = np.abs(np.asarray(z, dtype=complex))
        val = self.profile(rho) if self.profile is not None else self.const + self.a * rho ** 2 + self.b * rho ** 4
        return val if np.ndim(val) else float(val)

    def laplacian(self, rho):
        """∂∂̄ψ = ¼(ψ'' + ψ'/ρ); для семейства a + 4bρ²"""
        rho = np.asarray(rho, dtype=float)
        if self.profile is None:
            return self.a + 4.0 * self.b * rho ** 2
        h = 1e-4
        f = self.profile
        rr = np.maximum(rho, h)
        return 0.25 * ((f(rr + h) - 2 * f(rr) + f(rr - h)) / h ** 2 + (f(rr + h) - f(rr - h)) / (2 * h * rr))

    def check_subharmonic(self, n: int = 200) -> bool:
        rho = np.linspace(1e-3, 1.0 - 1e-3, n)
        return bool(np.all(self.laplacian(rho) >= -1e-8))

    def is_nonpositive(self, n: int = 200) -> bool:
        rho = np.linspace(0.0, 1.0, n)
        return bool(np.all(np.asarray(self(rho.astype(complex))) <= 0))


# ==================== КВАДРАТУРЫ ====================

def disk_integral(f: Callable, center: complex = 0j, radius: float = 1.0,
                  radial_nodes: Optional[int] = None, angular_nodes: Optional[int] = None) -> float:
    """
    ∫_{D(center, radius)} f dA: Гаусс-Лежандр по радиусу, равномерная сетка по углу.
    """
    cfg = ACTIVE_CONFIG.get_config('BOUNDS_CONFIG')
    nr = radial_nodes or cfg['radial_nodes']
    na = angular_nodes or cfg['angular_nodes']
    x, wx = roots_legendre(nr)
    rho = 0.5 * radius * (x + 1.0)
    w_rho = 0.5 * radius * wx
    phi = 2.0 * np.pi * np.arange(na) / na
    pts = center + rho[:, None] * np.exp(1j * phi)[None, :]
    vals = np.asarray(f(pts))
    return float(np.real(np.sum(vals * (w_rho * rho)[:, None]) * (2.0 * np.pi / na)))


def weighted_norm(u: BianalyticTestFn, psi: SubharmonicRadialPsi) -> float:
    """∫_𝔻 |u|² e^{2ψ} dA"""
    return disk_integral(lambda z: np.abs(u(z)) ** 2 * np.exp(2.0 * np.asarray(psi(z))))


def green_potential_origin(delta_psi: Callable[[np.ndarray], np.ndarray], nodes: int = 128,
                           tol: float = 1e-10, max_doublings: int = 4) -> float:
    """
    G[Δψ](0) = (1/π)∫_𝔻 log|w|² Δψ dA = 4∫₀¹ ρ log ρ Δψ(ρ) dρ для радиальной плотности.
    Замена ρ = t² сглаживает особенность в нуле: 16∫₀¹ t³ log t Δψ(t²) dt.

    Raises:
        NumericalError: DIVERGENT, если интеграл не стабилизируется при удвоении узлов
            или масса Рисса бесконечна
    """
    def integrate(n: int) -> Tuple[float, float]:
        x, wx = roots_legendre(n)
        t = 0.5 * (x + 1.0)
        w = 0.5 * wx
        dens = np.asarray(delta_psi(t ** 2), dtype=float)
        green = 16.0 * np.sum(w * t ** 3 * np.log(t) * dens)
        riesz = 4.0 * np.sum(w * t ** 3 * (1.0 - t ** 4) * dens)
        return float(green), float(riesz)

    prev, riesz = integrate(nodes)
    for _ in range(max_doublings):
        nodes *= 2
        cur, riesz = integrate(nodes)
        if not np.isfinite(riesz) or not np.isfinite(cur):
            break
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return min(cur, 0.0)
        prev = cur
    raise_for(ErrorCode.DIVERGENT, "потенциал Грина не сходится", last=prev, nodes=nodes)


# ==================== ОЦЕНКИ В ЕДИНИЧНОМ ДИСКЕ ====================

def check_submean_holomorphic(u: BianalyticTestFn, psi: SubharmonicRadialPsi) -> Pair:
    """|u(0)|² e^{2ψ(0)} <= (1/π)∫|u|² e^{2ψ} для голоморфной u"""
    if abs(u.c) > 0 or np.any(np.abs(u.u2) > 0):
        raise_for(ErrorCode.CONFIG_INVALID, "оценка среднего требует голоморфную u")
    lhs = abs(u(0j)) ** 2 * np.exp(2.0 * psi(0j))
    return float(lhs), weighted_norm(u, psi) / np.pi


def check_lemma1(u: BianalyticTestFn, psi: SubharmonicRadialPsi) -> Pair:
    """
    Базовая оценка:
    ∫₀¹ |u₁(0) + r²u₂(0) + (cr/π)∮ ζ̄ψ(rζ) ds|² r dr <= (e^{-2ψ(0)}/2π) ∫_𝔻 |u|² e^{2ψ} dA.

    Returns:
        (lhs, rhs)
    """
    cfg = ACTIVE_CONFIG.get_config('BOUNDS_CONFIG')
    x, wx = roots_legendre(cfg['radial_nodes'])
    r = 0.5 * (x + 1.0)
    wr = 0.5 * wx
    na = cfg['angular_nodes']
    zeta = np.exp(2j * np.pi * np.arange(na) / na)
    circle = np.asarray(psi(r[:, None] * zeta[None, :])) * np.conj(zeta)[None, :]
    moment = np.sum(circle, axis=1) * (2.0 * np.pi / na)
    inner = u.u1[0] + r ** 2 * u.u2[0] + u.c * r / np.pi * moment
    lhs = float(np.sum(wr * np.abs(inner) ** 2 * r))
    rhs = np.exp(-2.0 * psi(0j)) / (2.0 * np.pi) * weighted_norm(u, psi)
    return lhs, float(rhs)


def bound_dbar_origin(u: BianalyticTestFn, psi: SubharmonicRadialPsi) -> Pair:
    """|∂̄u(0)|² <= (3/π) e^{-2ψ(0)} ∫|u|² e^{2ψ}"""
    rhs = 3.0 / np.pi * np.exp(-2.0 * psi(0j)) * weighted_norm(u, psi)
    return float(abs(u.c) ** 2), float(rhs)


def bound_value_origin_neg(u: BianalyticTestFn, psi: SubharmonicRadialPsi) -> Pair:
    """
    |u(0)|² <= (8/π)(1 + 6|ψ(0)|²) e^{-2ψ(0)} ∫|u|² e^{2ψ} при ψ <= 0.

    Raises:
        ValidationError: PSI_NOT_NONPOSITIVE
    """
    if not psi.is_nonpositive():
        raise_for(ErrorCode.PSI_NOT_NONPOSITIVE, "ψ > 0 в точках сетки")
    p0 = psi(0j)
    rhs = 8.0 / np.pi * (1.0 + 6.0 * p0 ** 2) * np.exp(-2.0 * p0) * weighted_norm(u, psi)
    return float(abs(u(0j)) ** 2), float(rhs)


def bound_value_origin(u: BianalyticTestFn, psi: SubharmonicRadialPsi) -> Pair:
    """
    |u(0)|² <= (8/π)(1 + 6|G[Δψ](0)|²) e^{-2ψ(0)} ∫|u|² e^{2ψ}.

    Raises:
        NumericalError: DIVERGENT
    """
    green = green_potential_origin(psi.laplacian)
    rhs = 8.0 / np.pi * (1.0 + 6.0 * green ** 2) * np.exp(-2.0 * psi(0j)) * weighted_norm(u, psi)
    return float(abs(u(0j)) ** 2), float(rhs)


# ==================== ПЕРЕМАСШТАБИРОВАННЫЕ ОЦЕНКИ ====================

def sup_laplacian(P: HermitianPotential, z0: complex, delta: float, n: int = 48) -> float:
    """A = sup ΔQ на замкнутом D(z0, δ) по полярной сетке и граничной окружности"""
    rim = z0 + delta * np.exp(2j * np.pi * np.arange(n) / n)
    grid = np.concatenate([polar_grid(z0, delta, n, n), rim])
    return float(np.max(np.asarray(laplacian(P, grid))))


def _local_norm(u: BianalyticTestFn, P: HermitianPotential, m: float, delta: float, z0: complex) -> float:
    """e^{2mQ(z0)} ∫_{D(z0, δ/√m)} |u|² e^{-2mQ} dA"""
    q0 = eval_potential(P, z0)
    return disk_integral(lambda z: np.abs(u(z)) ** 2 * np.exp(-2.0 * m * (np.asarray(eval_potential(P, z)) - q0)),
                         center=z0, radius=delta / np.sqrt(m))


def bound_value_rescaled(u: BianalyticTestFn, P: HermitianPotential, m: float, delta: float,
                         z0: complex = 0j) -> Dict[str, float]:
    """
    |u(z0)|² против (8m/(πδ²))·C·e^{2Aδ²} e^{2mQ(z0)} ∫_{D(z0,δ/√m)} |u|² e^{-2mQ}
    с C = 1 + 6A²δ⁴ (основная константа) и C = 1 + 6A² (вторичная).

    Returns:
        {'lhs', 'rhs_primary', 'rhs_secondary', 'A'}
    """
    A = sup_laplacian(P, z0, delta)
    base = 8.0 * m / (np.pi * delta ** 2) * np.exp(2.0 * A * delta ** 2) * _local_norm(u, P, m, delta, z0)
    return {
        'lhs': float(abs(u(z0)) ** 2),
        'rhs_primary': float(base * (1.0 + 6.0 * A ** 2 * delta ** 4)),
        'rhs_secondary': float(base * (1.0 + 6.0 * A ** 2)),
        'A': A
    }


def bound_dbar_rescaled(u: BianalyticTestFn, P: HermitianPotential, m: float, delta: float,
                        z0: complex = 0j) -> Dict[str, float]:
    """
    |∂̄u(z0)|² против K·e^{2Aδ²} e^{2mQ(z0)} ∫_{D(z0,δ/√m)} |u|² e^{-2mQ}.

    Основная константа K = 3m²/(πδ⁴) получается заменой u_m(ξ) = u(z0 + δξ/√m)
    в оценке на единичном круге: ∂̄ дает множитель δ/√m, площадь - δ²/m.
    Константа K = 3m/(πδ²) из формулировки оценки возвращается отдельно и
    обычными функциями нарушается при m > δ².

    Returns:
        {'lhs', 'rhs_primary', 'rhs_display', 'A'}
    """
    A = sup_laplacian(P, z0, delta)
    base = np.exp(2.0 * A * delta ** 2) * _local_norm(u, P, m, delta, z0) / np.pi
    return {
        'lhs': float(abs(u.dbar(z0)) ** 2),
        'rhs_primary': float(3.0 * m ** 2 / delta ** 4 * base),
        'rhs_display': float(3.0 * m / delta ** 2 * base),
        'A': A
    }


def kernel_diag_bound(P: HermitianPotential, m: float, delta: float, z0: complex = 0j,
                      primary: bool = False) -> float:
    """
    Оценка диагонали бианалитического ядра:
    K_{2,m}(z0,z0) <= (8m/(πδ²))(1+6A²) e^{2Aδ²} e^{2mQ(z0)}.

    Args:
        primary: Использовать константу 1 + 6A²δ⁴ вместо 1 + 6A²
    """
    A = sup_laplacian(P, z0, delta)
    const = 1.0 + 6.0 * A ** 2 * (delta ** 4 if primary else 1.0)
    return float(8.0 * m / (np.pi * delta ** 2) * const * np.exp(2.0 * A * delta ** 2)
                 * np.exp(2.0 * m * eval_potential(P, z0)))


# ==================== СЛУЧАЙНАЯ ПРОВЕРКА ====================

@dataclass
class BoundTally:
    name: str
    informational: bool = False
    trials: int = 0
    max_ratio: float = 0.0
    failing_seeds: List[int] = field(default_factory=list)

    def record(self, seed: int, lhs: float, rhs: float, tol: float):
        self.trials += 1
        if rhs > 0:
            self.max_ratio = max(self.max_ratio, lhs / rhs)
        if lhs > rhs * (1.0 + tol):
            self.failing_seeds.append(seed)

    def to_dict(self) -> Dict[str, Any]:
        return {'trials': self.trials, 'max_ratio': self.max_ratio,
                'violations': len(self.failing_seeds), 'failing_seeds': list(self.failing_seeds),
                'informational': self.informational}


HARNESS_CHECKS = ['submean_holomorphic', 'lemma1', 'dbar_origin', 'value_origin_neg', 'value_origin',
                  'value_rescaled_primary', 'value_rescaled_secondary', 'dbar_rescaled', 'kernel_diag',
                  'dbar_rescaled_display']

# Не входят в общий флаг all_hold
INFORMATIONAL_CHECKS = {'dbar_rescaled_display'}


def _trial(seed: int, max_degree: int, coeff_bound: float) -> Dict[str, Pair]:
    """Одно испытание всех неравенств с собственным генератором"""
    rng = np.random.default_rng(seed)
    u = BianalyticTestFn.random(rng, max_degree, coeff_bound)
    holo = BianalyticTestFn.random(rng, max_degree, coeff_bound, holomorphic=True)
    psi = SubharmonicRadialPsi.random(rng)
    psi_neg = SubharmonicRadialPsi.random(rng, nonpositive=True)

    out = {
        'submean_holomorphic': check_submean_holomorphic(holo, psi),
        'lemma1': check_lemma1(u, psi),
        'dbar_origin': bound_dbar_origin(u, psi),
        'value_origin_neg': bound_value_origin_neg(u, psi_neg),
        'value_origin': bound_value_origin(u, psi)
    }

    s = rng.uniform(0.0, 0.2)
    P = HermitianPotential.quartic(s)
    m = float(rng.uniform(1.0, 50.0))
    delta = float(rng.uniform(0.3, 1.0))
    z0 = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
    # u масштабируется к окрестности размера δ/√m
    local = BianalyticTestFn.random(rng, 3, coeff_bound)
    shifted = _ShiftedFn(local, z0, np.sqrt(m) / delta)
    value = bound_value_rescaled(shifted, P, m, delta, z0)
    out['value_rescaled_primary'] = (value['lhs'], value['rhs_primary'])
    out['value_rescaled_secondary'] = (value['lhs'], value['rhs_secondary'])
    dbar = bound_dbar_rescaled(shifted, P, m, delta, z0)
    out['dbar_rescaled'] = (dbar['lhs'], dbar['rhs_primary'])
    out['dbar_rescaled_display'] = (dbar['lhs'], dbar['rhs_display'])

    gauss = HermitianPotential.gaussian()
    m_k = float(rng.uniform(1.0, 20.0))
    z_k = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    diag = float(np.real(gaussian_poly_kernel(2, m_k, z_k, z_k)))
    out['kernel_diag'] = (diag, kernel_diag_bound(gauss, m_k, delta, z_k))
    return out


class _ShiftedFn:
    """u(z) = v(s(z - z0)), бианалитична вместе с v"""

    def __init__(self, v: BianalyticTestFn, z0: complex, s: float):
        self.v = v
        self.z0 = z0
        self.s = s

    def __call__(self, z):
        return self.v((np.asarray(z, dtype=complex) - self.z0) * self.s)

    def dbar(self, z):
        return self.s * np.asarray(self.v.dbar((np.asarray(z, dtype=complex) - self.z0) * self.s))


def run_bounds_harness(trials: Optional[int] = None, seed: int = 0, threads: int = 1) -> Dict[str, Any]:
    """
    Рандомизированная проверка всех оценок.

    Returns:
        Отчет {проверка: {trials, max_ratio, violations, failing_seeds}} и общий флаг
    """
    cfg = ACTIVE_CONFIG.get_config('BOUNDS_CONFIG')
    trials = trials or cfg['trials']
    seeds = [seed * 1_000_003 + i for i in range(trials)]
    results = parallel_map(lambda s: _trial(s, cfg['max_degree'], cfg['coeff_bound']), seeds, threads=threads)
    tallies = {name: BoundTally(name, informational=name in INFORMATIONAL_CHECKS) for name in HARNESS_CHECKS}
    for s, res in zip(seeds, results):
        for name, (lhs, rhs) in res.items():
            tallies[name].record(s, lhs, rhs, cfg['tolerance'])
    report = {name: t.to_dict() for name, t in tallies.items()}
    violations = sum(len(t.failing_seeds) for t in tallies.values() if not t.informational)
    if violations:
        logger.warning("bounds_harness_violations count=%d", violations)
    logger.info("bounds_harness trials=%d violations=%d", trials, violations)
    return {'seed': seed, 'trials': trials, 'tolerance': cfg['tolerance'], 'checks': report,
            'all_hold': violations == 0}
