"""
Точные эталонные ядра: ядро Кошелева в диске и его подъем,
гауссовы полианалитические ядра (Лагерр), уровни Ландау и предельное ядро раздутия.
"""

from dataclasses import dataclass
from math import comb
from typing import Union

import numpy as np

from src.models.errors import ErrorCode, raise_for

# Комбинаторные множители ядра Кошелева ограничены этим q
MAX_Q = 12

ComplexLike = Union[complex, np.ndarray]


@dataclass(frozen=True)
class LaguerreEval:
    """Обобщенный полином Лагерра L^{(alpha)}_r, вычисляемый трехчленной рекуррентностью"""
    alpha: int
    r: int

    def __call__(self, x):
        return laguerre(self.alpha, self.r, x)

    def series(self, x):
        """Явная сумма Σ (-1)^k C(r+α, r-k) x^k / k!"""
        x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
        total = np.zeros_like(x)
        term_fact = 1.0
        for k in range(self.r + 1):
            if k > 0:
                term_fact *= k
            total = total + (-1) ** k * comb(self.r + self.alpha, self.r - k) * x ** k / term_fact
        return total


def laguerre(alpha: int, r: int, x):
    """
    L^{(α)}_r(x) по рекуррентности
    (k+1) L_{k+1} = (2k+1+α-x) L_k - (k+α) L_{k-1}.

    Аргумент может быть комплексным (нужен для подъемов ядра).
    """
    if alpha < 0 or r < 0:
        raise_for(ErrorCode.CONFIG_INVALID, "alpha и r должны быть >= 0", alpha=alpha, r=r)
    x = np.asarray(x)
    prev = np.ones_like(x, dtype=complex if np.iscomplexobj(x) else float)
    if r == 0:
        return prev if prev.ndim else prev.item()
    cur = 1.0 + alpha - x
    for k in range(1, r):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    cur = np.asarray(cur)
    return cur if cur.ndim else cur.item()


def _check_q(q: int):
    if not 1 <= q <= MAX_Q:
        raise_for(ErrorCode.CONFIG_INVALID, f"q должно быть в диапазоне 1..{MAX_Q}", q=q)


def _check_disk(*points):
    for p in points:
        if np.any(np.abs(np.asarray(p)) >= 1.0):
            raise_for(ErrorCode.OUT_OF_DOMAIN, "точка вне единичного диска",
                      point=str(np.asarray(p).ravel()[:4]))


# ==================== ЯДРО КОШЕЛЕВА ====================

def koshelev_lift(q: int, z: ComplexLike, zprime: ComplexLike,
                  w: ComplexLike, wprime: ComplexLike) -> ComplexLike:
    """
    Подъем E⊗2[K_q](z, z'; w, w') ядра единичного диска с весом 1/π.

    K = q Σ_j (-1)^j C(q, j+1) C(q+j, q) (1 - w' z̄')^{q-j-1} (z - w')^j (z̄' - w̄)^j / (1 - z w̄)^{q+j+1}

    Raises:
        ValidationError: OUT_OF_DOMAIN, если |z| >= 1 или |w| >= 1
    """
    _check_q(q)
    _check_disk(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zp_bar = np.conj(np.asarray(zprime, dtype=complex))
    wp = np.asarray(wprime, dtype=complex)
    wbar = np.conj(w)
    base = 1.0 - z * wbar
    total = 0j
    for j in range(q):
        coef = (-1) ** j * comb(q, j + 1) * comb(q + j, q)
        total = total + coef * (1.0 - wp * zp_bar) ** (q - j - 1) * ((z - wp) * (zp_bar - wbar)) ** j \
            / base ** (q + j + 1)
    total = q * np.asarray(total)
    return total if total.ndim else complex(total)


def koshelev_kernel(q: int, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """
    Полианалитическое ядро Бергмана единичного диска с весом 1/π.

    Диагональ: K_q(z,z) = q² / (1 - |z|²)².
    """
    return koshelev_lift(q, z, z, w, w)


# ==================== ГАУССОВЫ ЯДРА ====================

def gaussian_poly_lift(q: int, m: float, z: ComplexLike, zprime: ComplexLike,
                       w: ComplexLike, wprime: ComplexLike) -> ComplexLike:
    """
    Подъем гауссова q-аналитического ядра:
    (2m/π) L^{(1)}_{q-1}(2m (z - w')(z̄' - w̄)) e^{2m z w̄}.
    """
    if not m > 0:
        raise_for(ErrorCode.CONFIG_INVALID, "m должно быть > 0", m=m)
    z = np.asarray(z, dtype=complex)
    wbar = np.conj(np.asarray(w, dtype=complex))
    x = 2.0 * m * (z - np.asarray(wprime, dtype=complex)) * (np.conj(np.asarray(zprime, dtype=complex)) - wbar)
    val = np.asarray((2.0 * m / np.pi) * laguerre(1, q - 1, x) * np.exp(2.0 * m * z * wbar))
    return val if val.ndim else complex(val)


def gaussian_poly_kernel(q: int, m: float, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """(2m/π) L^{(1)}_{q-1}(2m|z-w|²) e^{2m z w̄}"""
    return gaussian_poly_lift(q, m, z, z, w, w)


def landau_level_kernel(q: int, m: float, z: ComplexLike, w: ComplexLike) -> ComplexLike:
    """
    Ядро уровня Ландау δK_{q,m} = K_{q,m} - K_{q-1,m} (K_{0,m} ≡ 0).

    Совпадает с (2m/π) L^{(0)}_{q-1}(2m|z-w|²) e^{2m z w̄}.
    """
    if q < 1:
        raise_for(ErrorCode.CONFIG_INVALID, "q должно быть >= 1", q=q)
    upper = gaussian_poly_kernel(q, m, z, w)
    if q == 1:
        return upper
    return upper - gaussian_poly_kernel(q - 1, m, z, w)


def limit_blowup_kernel(xi: ComplexLike, eta: ComplexLike):
    """Предельное ядро |2 - |ξ-η|²| / π · e^{-|ξ-η|²/2}"""
    d2 = np.abs(np.asarray(xi, dtype=complex) - np.asarray(eta, dtype=complex)) ** 2
    val = np.abs(2.0 - d2) / np.pi * np.exp(-d2 / 2.0)
    return val if np.ndim(val) else float(val)


def limit_blowup_kernel_signed(xi: ComplexLike, eta: ComplexLike):
    """Знаковый вариант (2 - |ξ-η|²)/π · e^{-|ξ-η|²/2}"""
    d2 = np.abs(np.asarray(xi, dtype=complex) - np.asarray(eta, dtype=complex)) ** 2
    val = (2.0 - d2) / np.pi * np.exp(-d2 / 2.0)
    return val if np.ndim(val) else float(val)
