"""
Случайные проверки тождеств операторного исчисления.
"""

import logging
from typing import Dict, List, Optional

import numpy as np

from src.jetcas.coeff import CoeffExpr, ZERO
from src.jetcas.operators import (op_2m_mul_z_minus_w, op_N, op_S, op_S_inv, op_dtheta, op_dw,
                                  op_mul_z_minus_w, op_nabla)
from src.jetcas.series import JetSeries, MSeries
from src.jetcas.solver import phase_identities

logger = logging.getLogger(__name__)

SYMBOL_POOL = [(1, 0), (2, 0), (1, 1), (2, 1), (1, 2), (3, 0), (2, 2)]


def random_coeff(rng: np.random.Generator, max_terms: int = 2) -> CoeffExpr:
    """Небольшой случайный коэффициент: сумма целых кратных символов"""
    total = ZERO
    for _ in range(int(rng.integers(1, max_terms + 1))):
        a, b = SYMBOL_POOL[int(rng.integers(len(SYMBOL_POOL)))]
        scalar = int(rng.integers(-3, 4))
        term = CoeffExpr.symbol(a, b) * scalar if rng.random() < 0.7 else CoeffExpr.const(scalar)
        total = total + term
    return total


def random_series(rng: np.random.Generator, T: int, ubar_degree: int = 1, density: float = 0.5) -> JetSeries:
    """Случайный джет степени T с p̄ <= ubar_degree"""
    terms = {}
    for p in range(T + 1):
        for pbar in range(min(ubar_degree, T - p) + 1):
            if rng.random() < density:
                terms[(p, pbar)] = random_coeff(rng)
    return JetSeries(terms, T)


def random_mseries(rng: np.random.Generator, T: int, grades: int = 3) -> MSeries:
    return MSeries({g: random_series(rng, T) for g in range(grades)})


def _reliable_equal(lhs: MSeries, rhs: MSeries) -> bool:
    floors = [f for f in (lhs.floor, rhs.floor) if f is not None]
    floor = max(floors) if floors else None
    keys = set(lhs.grades) | set(rhs.grades)
    for g in keys:
        if floor is not None and g < floor:
            continue
        if not (lhs.grade(g) - rhs.grade(g)).is_zero():
            return False
    return True


# ==================== ТОЖДЕСТВА ====================

def check_s_nabla(a: MSeries, k: int) -> bool:
    """S ∇̸ = 2m M_{z-w} S"""
    return _reliable_equal(op_S(op_nabla(a), k), op_2m_mul_z_minus_w(op_S(a, k)))


def check_nabla_s_inv(a: MSeries, k: int) -> bool:
    """∇̸ S⁻¹ = 2m S⁻¹ M_{z-w}"""
    return _reliable_equal(op_nabla(op_S_inv(a, k)), op_S_inv(op_2m_mul_z_minus_w(a), k))


def check_n_inverse(s: JetSeries) -> bool:
    """N M_{z-w} = id"""
    return (op_N(op_mul_z_minus_w(s)) - s).is_zero()


def check_commuting(s: JetSeries) -> bool:
    """d_w d_θ = d_θ d_w"""
    return (op_dw(op_dtheta(s)) - op_dtheta(op_dw(s))).is_zero()


def check_commutator(s: JetSeries, j: int) -> bool:
    """d_w^j M_{z-w} = -j d_w^{j-1} + M_{z-w} d_w^j, j >= 1"""
    lhs = op_mul_z_minus_w(s)
    for _ in range(j):
        lhs = op_dw(lhs)
    lower = s
    for _ in range(j - 1):
        lower = op_dw(lower)
    rhs = op_mul_z_minus_w(op_dw(lower)) - lower.scale(j)
    return (lhs - rhs).is_zero()


def run_identity_checks(seed: int = 0, trials: int = 5, T: int = 6, k: Optional[int] = None) -> Dict[str, object]:
    """
    Прогоняет все тождества на случайных входах.

    Args:
        k: Порядок S и S⁻¹; по умолчанию наибольший, который выдерживает джет степени T
        (∇̸ тратит одну степень, каждое D - две), но не больше 3

    Returns:
        Словарь {имя тождества: все испытания прошли} плюс список провалов
    """
    if k is None:
        k = min(3, (T - 1) // 2)
    # d_w^j тратит j степеней джета степени T - 2
    max_j = min(4, T - 2)
    rng = np.random.default_rng(seed)
    results = {name: True for name in ('s_nabla', 'nabla_s_inv', 'n_inverse', 'commuting', 'commutator')}
    failures: List[str] = []

    for trial in range(trials):
        a = random_mseries(rng, T)
        s = random_series(rng, T - 2)
        checks = {
            's_nabla': check_s_nabla(a, k),
            'nabla_s_inv': check_nabla_s_inv(a, k),
            'n_inverse': check_n_inverse(s),
            'commuting': check_commuting(s),
            'commutator': all(check_commutator(s, j) for j in range(1, max_j + 1))
        }
        for name, ok in checks.items():
            if not ok:
                results[name] = False
                failures.append(f"{name}#{trial}")

    for name, ok in phase_identities().items():
        results[name] = ok
        if not ok:
            failures.append(name)

    logger.info("identity_checks seed=%d trials=%d failures=%d", seed, trials, len(failures))
    return {'seed': seed, 'trials': trials, 'T': T, 'k': k, 'max_j': max_j, 'results': results,
            'failures': failures, 'all_passed': not failures}
