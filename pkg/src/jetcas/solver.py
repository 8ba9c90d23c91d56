"""
Решатель корректирующего алгоритма для q = 1 и q = 2.

Все коэффициенты возвращаются умноженными на π: например, L₀ для q = 1
равно 2β (то есть (2/π)β в исходных единицах).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Dict, List, Optional

from src.config.kernel_config import ACTIVE_CONFIG
from src.jetcas.coeff import CoeffExpr, ZERO
from src.jetcas.operators import (membership_test, op_D, op_S, op_Sprime, u0_part, op_N,
                                  op_mul_recip, op_dtheta, op_mul_dbar_theta)
from src.jetcas.series import (JetSeries, MSeries, d_w_theta_series, dbar_theta_series,
                               recip_dbar_theta)
from src.models.errors import ErrorCode, raise_for

logger = logging.getLogger(__name__)

Q = CoeffExpr.symbol
BETA = CoeffExpr.beta()


def b(i: int, j: int) -> CoeffExpr:
    """Символ ∂_z^i ∂̄_w^j β = Q_{i+1,j+1}"""
    return Q(i + 1, j + 1)


@dataclass(frozen=True)
class BianalyticCoeffs:
    """
    Коэффициент L = c0 - c1 ū - c2 u + c3 u ū
    (= c0 + c1(z̄ - w̄) + c2(z - w) + c3|z - w|²).
    """
    c0: CoeffExpr
    c1: CoeffExpr
    c2: CoeffExpr
    c3: CoeffExpr

    @classmethod
    def zero(cls) -> 'BianalyticCoeffs':
        return cls(ZERO, ZERO, ZERO, ZERO)

    def to_series(self, T: int) -> JetSeries:
        return JetSeries({(0, 0): self.c0, (0, 1): -self.c1, (1, 0): -self.c2, (1, 1): self.c3}, T)

    def __sub__(self, other: 'BianalyticCoeffs') -> 'BianalyticCoeffs':
        return BianalyticCoeffs(self.c0 - other.c0, self.c1 - other.c1,
                                self.c2 - other.c2, self.c3 - other.c3)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.as_tuple())

    def as_tuple(self):
        return (self.c0, self.c1, self.c2, self.c3)

    def evaluate(self, lookup, u: complex, ubar: complex) -> complex:
        c0, c1, c2, c3 = (c.evaluate(lookup) for c in self.as_tuple())
        return c0 - c1 * ubar - c2 * u + c3 * u * ubar


def _truncation(required: int, T: Optional[int]) -> int:
    cfg = ACTIVE_CONFIG.get_config('JETCAS_CONFIG')
    return max(T if T is not None else cfg['truncation'], required)


# ==================== q = 1 ====================

def solve_expansion_q1(j_max: int, T: Optional[int] = None) -> List[CoeffExpr]:
    """
    Коэффициенты π·L_j, j = 0..j_max, для q = 1.

    L_0 = 2β; при j >= 1 условие Σ_{i<=j} (1/(i! 2^i)) D^i (L_{j-i}/∂̄θ) ∈ M_{z-w}R_1
    определяет L_j через u⁰-часть суммы с i >= 1.

    Raises:
        ValidationError: ORDER_UNAVAILABLE при j_max выше max_q1_order
        NumericalError: SOLVER_INCONSISTENT
    """
    cfg = ACTIVE_CONFIG.get_config('JETCAS_CONFIG')
    if not 0 <= j_max <= cfg['max_q1_order']:
        raise_for(ErrorCode.ORDER_UNAVAILABLE, "порядок для q=1 недоступен", j_max=j_max,
                  max_order=cfg['max_q1_order'])
    T = _truncation(2 * j_max + 1, T)
    recip = recip_dbar_theta(T)

    coeffs = [BETA * 2]
    ok, residual = membership_test(recip.scale(coeffs[0]) - JetSeries.const(2, T), 1, 1)
    if not ok:
        raise_for(ErrorCode.SOLVER_INCONSISTENT, f"условие для L_0 не выполнено: {residual}")

    for j in range(1, j_max + 1):
        acc = JetSeries.zero(T)
        for i in range(1, j + 1):
            cur = recip.scale(coeffs[j - i])
            for _ in range(i):
                cur = op_D(cur)
            acc = acc + cur.scale(Fraction(1, factorial(i) * 2 ** i))
        head = u0_part(acc)
        if any(key != (0, 0) for key, _ in head.items()):
            raise_for(ErrorCode.SOLVER_INCONSISTENT, "u⁰-часть содержит степени ū при q=1", order=j)
        coeff = -(BETA * acc.coeff(0, 0))
        total = acc + recip.scale(coeff)
        ok, residual = membership_test(total, 1, 1)
        if not ok:
            raise_for(ErrorCode.SOLVER_INCONSISTENT, f"условие порядка {j} не выполнено: {residual}")
        coeffs.append(coeff)
        logger.debug("q1_order_solved j=%d coeff=%s", j, coeff)
    return coeffs


# ==================== q = 2 ====================

def initial_amplitude_q2(T: int) -> MSeries:
    """
    π R/∂̄θ для начального ядра M_{2,m}:
    степень 2: -4 u ū ∂̄θ; степень 1: 4 + 2 ū ∂̄²θ / ∂̄θ.
    """
    dbar = dbar_theta_series(T)
    top = dbar.mul_u().mul_ubar().truncate(T).scale(-4)
    second = dbar_theta_series(T, extra_dbar=1) * recip_dbar_theta(T)
    lower = JetSeries.const(4, T) + second.mul_ubar().truncate(T).scale(2)
    return MSeries({2: top, 1: lower})


def _amplitude(coeffs: List[BianalyticCoeffs], T: int) -> MSeries:
    """Σ_j m^{2-j} L_j/∂̄θ - R/∂̄θ (всё умножено на π)"""
    recip = recip_dbar_theta(T)
    grades = {2 - j: c.to_series(T) * recip for j, c in enumerate(coeffs)}
    return MSeries(grades) - initial_amplitude_q2(T)


def _split_head(head: JetSeries, order: int, label: str):
    """u⁰-часть вида x + y ū -> (x, y)"""
    for (p, pbar), _ in head.items():
        if pbar > 1:
            raise_for(ErrorCode.SOLVER_INCONSISTENT, f"{label}: u⁰-часть имеет степень ū > 1", order=order)
    return head.coeff(0, 0), head.coeff(0, 1)


def conditions_q2(coeffs: List[BianalyticCoeffs], T: int) -> Dict[str, Any]:
    """
    Проверяет S- и S'-условия на степени 2 - j для последнего коэффициента.

    Returns:
        Словарь с флагами и остатками
    """
    j = len(coeffs) - 1
    amp = _amplitude(coeffs, T)
    s_part = op_S(amp, j).grade(2 - j)
    sp_part = op_Sprime(amp, j).grade(2 - j)
    s_ok, s_res = membership_test(s_part, 1, 2)
    sp_ok, sp_res = membership_test(sp_part, 1, 2)
    return {'order': j, 's_holds': s_ok, 's_residual': s_res,
            'sprime_holds': sp_ok, 'sprime_residual': sp_res}


def solve_expansion_q2(j_max: int, T: Optional[int] = None) -> List[BianalyticCoeffs]:
    """
    Коэффициенты π·L²_j, j = 0..j_max, в пространстве {1, ū, u, uū}.

    Шаг 1: S-условие степени 2-j при L_j = 0 дает K; c0 - c1ū = -β K_{u⁰}.
    Шаг 2: S'-условие при L_j = c0 - c1ū дает K'; c2 - c3ū = -β² K'_{u⁰}.

    Raises:
        ValidationError: ORDER_UNAVAILABLE
        NumericalError: SOLVER_INCONSISTENT
    """
    cfg = ACTIVE_CONFIG.get_config('JETCAS_CONFIG')
    if not 0 <= j_max <= cfg['max_q2_order']:
        raise_for(ErrorCode.ORDER_UNAVAILABLE, "порядок для q=2 недоступен", j_max=j_max,
                  max_order=cfg['max_q2_order'])
    T = _truncation(2 * j_max + 3, T)
    solved: List[BianalyticCoeffs] = []
    for j in range(j_max + 1):
        trial = solved + [BianalyticCoeffs.zero()]
        head = u0_part(op_S(_amplitude(trial, T), j).grade(2 - j))
        x, y = _split_head(head, j, "S-условие")
        c0, c1 = -(BETA * x), BETA * y

        trial = solved + [BianalyticCoeffs(c0, c1, ZERO, ZERO)]
        head = u0_part(op_Sprime(_amplitude(trial, T), j).grade(2 - j))
        x, y = _split_head(head, j, "S'-условие")
        beta2 = BETA * BETA
        c2, c3 = -(beta2 * x), beta2 * y

        candidate = BianalyticCoeffs(c0, c1, c2, c3)
        report = conditions_q2(solved + [candidate], T)
        if not (report['s_holds'] and report['sprime_holds']):
            raise_for(ErrorCode.SOLVER_INCONSISTENT, "условия не выполнены в пространстве анзаца", order=j,
                      s_residual=repr(report['s_residual']), sprime_residual=repr(report['sprime_residual']))
        solved.append(candidate)
        logger.debug("q2_order_solved j=%d", j)
    return solved


# ==================== ПЕЧАТНЫЕ ФОРМУЛЫ ====================

def printed_xi2() -> CoeffExpr:
    """π Ξ₂ в чтении '∂_z b' как ∂_zβ"""
    return (b(0, 1) * b(1, 0) * Fraction(3, 2)).div_beta(2) \
        - (b(1, 0) * b(1, 1) * b(0, 1) * Fraction(13, 2)).div_beta(3) \
        + (b(1, 1) * b(1, 1) * Fraction(3, 2)).div_beta(2) \
        - (b(1, 0) * b(1, 0) * b(0, 2)).div_beta(3) \
        + (b(1, 0) * b(1, 0) * b(0, 1) * b(0, 1) * Fraction(17, 4)).div_beta(4) \
        - (b(2, 2) * Fraction(2, 3)).div_beta(1) \
        + (b(2, 1) * b(0, 1) * Fraction(3, 2)).div_beta(2) \
        - (b(2, 0) * b(0, 1) * b(0, 1)).div_beta(3) \
        + (b(2, 0) * b(0, 2) * Fraction(1, 3)).div_beta(2)


def log_beta_mixed() -> CoeffExpr:
    """A = ∂_z∂̄_w log β = b11/b - b10 b01/b²"""
    return b(1, 1).div_beta(1) - (b(1, 0) * b(0, 1)).div_beta(2)


def printed_q2(j: int) -> BianalyticCoeffs:
    """
    Коэффициенты π·L²_j из опубликованных формул (j = 0, 1, 2).
    """
    if j == 0:
        return BianalyticCoeffs(ZERO, ZERO, ZERO, -(BETA * BETA * 4))
    if j == 1:
        return BianalyticCoeffs(BETA * 4, -(b(0, 1) * 2), b(1, 0) * 2,
                                -(b(1, 1) * 3) + (b(1, 0) * b(0, 1) * 2).div_beta(1))
    if j == 2:
        a = log_beta_mixed()
        c = b(2, 1).div_beta(1) - (b(1, 0) * b(1, 1) * 2 + b(2, 0) * b(0, 1)).div_beta(2) \
            + (b(1, 0) * b(1, 0) * b(0, 1) * 2).div_beta(3)
        bb = b(1, 2).div_beta(1) - (b(0, 1) * b(1, 1) * 2 + b(1, 0) * b(0, 2)).div_beta(2) \
            + (b(1, 0) * b(0, 1) * b(0, 1) * 2).div_beta(3)
        return BianalyticCoeffs(a * 2, -bb, c, printed_xi2())
    raise_for(ErrorCode.ORDER_UNAVAILABLE, "опубликованы только порядки 0, 1, 2", order=j)


def verify_printed_q2(j: int, T: Optional[int] = None, compare_solved: bool = True) -> Dict[str, Any]:
    """
    Подставляет опубликованные L²_0..L²_j и проверяет условия порядка j.

    Расхождения сообщаются, но не исправляются.

    Returns:
        Отчет: флаги S/S'-условий, остатки и (при compare_solved) разность
        решенного и напечатанного коэффициента по компонентам
    """
    T = _truncation(2 * j + 3, T)
    coeffs = [printed_q2(i) for i in range(j + 1)]
    report = conditions_q2(coeffs, T)
    report['residual_zero'] = bool(report['s_holds'] and report['sprime_holds'])
    if compare_solved:
        try:
            solved = solve_expansion_q2(j, T)[j]
            diff = solved - coeffs[j]
            report['solved_minus_printed'] = {f"c{i}": c for i, c in enumerate(diff.as_tuple())}
            report['solved_matches_printed'] = diff.is_zero()
        except Exception as e:  # отчет не должен падать
            logger.warning("verify_printed_solve_failed order=%d error=%s", j, e)
            report['solve_error'] = str(e)
    logger.info("verify_printed_q2 order=%d residual_zero=%s", j, report['residual_zero'])
    return report


# ==================== ОБЪЕДИНЕННЫЕ УСЛОВИЯ ====================

def united_condition_q2(j: int, coeffs: List[BianalyticCoeffs], T: Optional[int] = None) -> JetSeries:
    """
    Объединенное условие порядка j (j = 0, 1), которое должно лежать в M²_{z-w}R_2:

    j = 0: L₀/∂̄θ + 4uū∂̄θ;
    j = 1: L₁/∂̄θ + D{½L₀/∂̄θ + 2uū∂̄θ} - 4 - 2ū d_θ∂̄θ
           + (z-w) ∂̄θ [D, M_{1/∂̄θ}] N{½L₀/∂̄θ + 2uū∂̄θ}.
    """
    T = _truncation(5, T)
    recip = recip_dbar_theta(T)
    uu_dbar = dbar_theta_series(T).mul_u().mul_ubar().truncate(T)
    if j == 0:
        return coeffs[0].to_series(T) * recip + uu_dbar.scale(4)
    if j == 1:
        inner = coeffs[0].to_series(T) * recip.scale(Fraction(1, 2)) + uu_dbar.scale(2)
        n_inner = op_N(inner)
        commutator = op_D(op_mul_recip(n_inner)) - op_mul_recip(op_D(n_inner))
        correction = op_mul_dbar_theta(commutator).mul_u().scale(-1)
        dtheta_dbar = op_dtheta(dbar_theta_series(T))
        return (coeffs[1].to_series(T) * recip + op_D(inner) - JetSeries.const(4, T)
                - dtheta_dbar.mul_ubar().scale(2) + correction)
    raise_for(ErrorCode.ORDER_UNAVAILABLE, "объединенные условия определены для j = 0, 1", order=j)


# ==================== ТОЖДЕСТВА ФАЗОВОЙ ФУНКЦИИ ====================

def ratio_series(T: int) -> JetSeries:
    """∂_wθ / ∂̄_wθ"""
    return d_w_theta_series(T) * recip_dbar_theta(T)


def phase_identities(T: Optional[int] = None) -> Dict[str, bool]:
    """
    Три факта о рядах фазовой функции:
    ∂_wθ/∂̄θ - ½Q₂₀/β ∈ M¹R₁;
    то же минус (w-z){⅓Q₃₀/β - ¼Q₂₀Q₂₁/β²} ∈ M²R₁;
    uū∂̄θ - uūβ - ½u²ūQ₂₁ ∈ M³R₂.
    """
    T = _truncation(4, T)
    ratio = ratio_series(T)
    first = ratio - JetSeries.const(Q(2, 0).div_beta() * Fraction(1, 2), T)
    refined_coeff = Q(3, 0).div_beta() * Fraction(1, 3) - (Q(2, 0) * Q(2, 1)).div_beta(2) * Fraction(1, 4)
    second = first - JetSeries.monomial(1, 0, refined_coeff, T)
    uu = dbar_theta_series(T).mul_u().mul_ubar().truncate(T)
    third = uu - JetSeries.monomial(1, 1, BETA, T) - JetSeries.monomial(2, 1, Q(2, 1) * Fraction(1, 2), T)
    return {
        'ratio_order1': membership_test(first, 1, 1)[0],
        'ratio_order2': membership_test(second, 2, 1)[0],
        'dbar_theta_uubar': membership_test(third, 3, 2)[0]
    }
