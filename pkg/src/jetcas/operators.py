"""
Операторное исчисление корректирующего алгоритма:
d_w, d_θ, ∇̸, S, S⁻¹, N, S' и проверка принадлежности M^k_{z-w} R_q.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Tuple, Union

from src.jetcas.series import (JetSeries, MSeries, d_w_theta_series, dbar_theta_series,
                               recip_dbar_theta)
from src.models.errors import ErrorCode, raise_for

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _recip(T: int) -> JetSeries:
    return recip_dbar_theta(T)


@lru_cache(maxsize=None)
def _dw_ratio(T: int) -> JetSeries:
    """∂_wθ / ∂̄_wθ"""
    return d_w_theta_series(T) * _recip(T)


def _std_level(s: JetSeries) -> int:
    return max(s.truncation, 0)


# ==================== ДИФФЕРЕНЦИРОВАНИЯ ====================

def op_dtheta(s: JetSeries) -> JetSeries:
    """d_θ = (1/∂̄_wθ) ∂̄_w"""
    return _recip(_std_level(s)) * s.d_wbar()


def op_dw(s: JetSeries) -> JetSeries:
    """d_w = ∂_w - (∂_wθ/∂̄_wθ) ∂̄_w"""
    return s.d_u() - _dw_ratio(_std_level(s)) * s.d_wbar()


def op_D(s: JetSeries) -> JetSeries:
    """Диффузионный оператор d_w d_θ"""
    return op_dw(op_dtheta(s))


def op_mul_z_minus_w(s: JetSeries) -> JetSeries:
    """M_{z-w}: умножение на z - w = -u"""
    return -s.mul_u()


def op_mul_recip(s: JetSeries) -> JetSeries:
    """M_{1/∂̄θ}"""
    return _recip(_std_level(s) + 1) * s


def op_mul_dbar_theta(s: JetSeries) -> JetSeries:
    """M_{∂̄θ}"""
    return dbar_theta_series(_std_level(s) + 1) * s


# ==================== ОПЕРАТОРЫ НА M-РЯДАХ ====================

def op_nabla(a: MSeries) -> MSeries:
    """
    ∇̸ = d_θ + 2m M_{z-w}: степень g результата равна d_θ a_g - 2u a_{g-1}.
    """
    out: Dict[int, JetSeries] = {}
    for g, s in a.grades.items():
        term = op_dtheta(s)
        out[g] = out[g] + term if g in out else term
        shifted = op_mul_z_minus_w(s).scale(2)
        out[g + 1] = out[g + 1] + shifted if (g + 1) in out else shifted
    floor = None if a.floor is None else a.floor + 1
    return MSeries(out, floor)


def op_2m_mul_z_minus_w(a: MSeries) -> MSeries:
    """2m M_{z-w}"""
    out = {g + 1: op_mul_z_minus_w(s).scale(2) for g, s in a.grades.items()}
    floor = None if a.floor is None else a.floor + 1
    return MSeries(out, floor)


def _diffusion(a: MSeries, k: int, sign: int) -> MSeries:
    """
    Σ_{i<=k} sign^i (2m)^{-i}/i! D^i. Степени ниже нового floor не вычисляются.
    """
    if k < 0:
        raise_for(ErrorCode.CONFIG_INVALID, "k должно быть >= 0", k=k)
    if not a.grades:
        return MSeries({}, a.floor)
    top = a.top
    floor = top - k if a.floor is None else max(a.floor, top - k)
    out: Dict[int, JetSeries] = {}
    for h, s in sorted(a.grades.items(), reverse=True):
        if h < floor:
            continue
        cur = s
        for i in range(min(k, h - floor) + 1):
            if i > 0:
                if cur.truncation < 2:
                    raise_for(ErrorCode.TRUNCATION_EXHAUSTED, "недостаточная степень джета для D^i",
                              grade=h, power=i, truncation=cur.truncation)
                cur = op_D(cur)
            term = cur.scale(Fraction(sign ** i, 2 ** i * factorial(i)))
            g = h - i
            out[g] = out[g] + term if g in out else term
    return MSeries(out, floor)


def op_S(a: MSeries, k: int) -> MSeries:
    """S = Σ_{i<=k} (2m)^{-i}/i! (d_w d_θ)^i"""
    return _diffusion(a, k, 1)


def op_S_inv(a: MSeries, k: int) -> MSeries:
    """S⁻¹ = Σ_{i<=k} (-1)^i (2m)^{-i}/i! (d_w d_θ)^i"""
    return _diffusion(a, k, -1)


# ==================== ОПЕРАТОР N ====================

def taylor_shift(c, T: int) -> JetSeries:
    """
    Диагональное ограничение коэффициента: c(w, w̄) = Σ_{s<=T} u^s ∂_z^s c(z, w̄)/s!.
    """
    out = {}
    cur = c
    for s in range(T + 1):
        if cur.is_zero():
            break
        out[(s, 0)] = cur / factorial(s)
        cur = cur.d_z()
    return JetSeries(out, T)


def _n_holomorphic(x: JetSeries) -> JetSeries:
    """N на ряду без ū: (X(z,w) - X(w,w))/(z - w)"""
    T = x.truncation
    diff = x - taylor_shift(x.coeff(0, 0), T)
    if not diff.coeff(0, 0).is_zero():
        raise_for(ErrorCode.INEXACT_DIVISION, "разность не делится на (z - w)")
    out = {(p - 1, 0): -c for (p, _), c in diff.items()}
    return JetSeries(out, T - 1)


def op_N(s: JetSeries, q: int = 2) -> JetSeries:
    """
    N f = Σ_i ū^i (f_i(z,w) - f_i(w,w))/(z - w) для f = Σ_{i<q} ū^i f_i.

    Raises:
        ValidationError: UBAR_DEGREE_TOO_HIGH, если степень по ū больше q-1
        NumericalError: INEXACT_DIVISION
    """
    if s.ubar_degree() > q - 1:
        raise_for(ErrorCode.UBAR_DEGREE_TOO_HIGH, "степень по ū превышает q-1",
                  degree=s.ubar_degree(), q=q)
    result = JetSeries.zero(s.truncation - 1)
    for i in range(max(s.ubar_degree(), 0) + 1):
        comp = s.ubar_component(i)
        if comp.is_zero():
            continue
        result = result + _n_holomorphic(comp).mul_ubar(i)
    return result


def op_Sprime(a: MSeries, k: int, q: int = 2) -> MSeries:
    """S' = S M_{1/∂̄θ} S⁻¹ N S"""
    step = op_S(a, k).map(lambda s: op_N(s, q))
    step = op_S_inv(step, k).map(op_mul_recip)
    return op_S(step, k)


# ==================== ПРИНАДЛЕЖНОСТЬ ====================

def membership_test(a: Union[JetSeries, MSeries], k: int, q: int) -> Tuple[bool, Union[JetSeries, MSeries]]:
    """
    Проверка a ∈ M^k_{z-w} R_q по мономам: все члены с p >= k и p̄ <= q-1.

    Для MSeries проверяются только точные степени m (не ниже floor).

    Returns:
        (результат, нарушающая часть)
    """
    if isinstance(a, MSeries):
        residual = {}
        for g in a.reliable_grades():
            ok, res = membership_test(a.grades[g], k, q)
            if not ok:
                residual[g] = res
        return not residual, MSeries(residual, a.floor)
    bad = {key: c for key, c in a.items() if key[0] < k or key[1] > q - 1}
    if a.truncation < k - 1:
        logger.warning("membership_truncation_short truncation=%d k=%d", a.truncation, k)
    return not bad, JetSeries(bad, a.truncation)


def u0_part(s: JetSeries) -> JetSeries:
    """Члены с p = 0 (ряд по ū)"""
    return JetSeries({key: c for key, c in s.items() if key[0] == 0}, s.truncation)
