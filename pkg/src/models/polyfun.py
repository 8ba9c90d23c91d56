"""
Модель q-аналитического полинома f(z) = Σ c[r][j] z̄^r z^j,
его векторизации V[f], расширения E[f] и сингулярной матрицы A(z).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.models.errors import ErrorCode, raise_for


@dataclass(frozen=True, eq=False)
class PolyanalyticPoly:
    """
    q-аналитический полином.

    Коэффициенты c[r][j]: 0 <= r < q (степень по z̄), 0 <= j < n (степень по z).
    Условие ∂̄^q f ≡ 0 выполнено по построению.
    """
    q: int
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if self.q < 1 or self.n < 1:
            raise_for(ErrorCode.CONFIG_INVALID, "q и n должны быть >= 1", q=self.q, n=self.n)
        if c.shape != (self.q, self.n):
            raise_for(ErrorCode.CONFIG_INVALID, "размер коэффициентов не совпадает с (q, n)",
                      shape=list(c.shape), q=self.q, n=self.n)
        c.setflags(write=False)
        object.__setattr__(self, 'coeffs', c)

    @classmethod
    def zeros(cls, q: int, n: int) -> 'PolyanalyticPoly':
        return cls(q=q, n=n, coeffs=np.zeros((q, n), dtype=complex))

    @classmethod
    def random(cls, q: int, n: int, rng: Optional[np.random.Generator] = None,
               scale: float = 1.0) -> 'PolyanalyticPoly':
        """Случайный полином с комплексными гауссовыми коэффициентами"""
        rng = rng or np.random.default_rng()
        c = scale * (rng.standard_normal((q, n)) + 1j * rng.standard_normal((q, n)))
        return cls(q=q, n=n, coeffs=c)

    def component(self, r: int) -> np.ndarray:
        """Коэффициенты голоморфной компоненты f_r"""
        return self.coeffs[r]


def _powers(z: complex, count: int) -> np.ndarray:
    return np.power(complex(z), np.arange(count))


def eval(f: PolyanalyticPoly, z: complex) -> complex:
    """Прямое вычисление суммы Σ c[r][j] z̄^r z^j"""
    return complex(_powers(np.conj(z), f.q) @ f.coeffs @ _powers(z, f.n))


def vectorize(f: PolyanalyticPoly, z: complex) -> np.ndarray:
    """
    Векторизация V[f](z): столбец (f_0(z), ..., f_{q-1}(z)).

    Returns:
        Комплексный вектор длины q
    """
    return f.coeffs @ _powers(z, f.n)


def extend(f: PolyanalyticPoly, z: complex, zprime: complex) -> complex:
    """
    Расширение E[f](z, z') = Σ_r (z̄')^r f_r(z).

    Голоморфно по z и антиголоморфно по z'; E[f](z, z) = f(z).
    """
    return complex(_powers(np.conj(zprime), f.q) @ vectorize(f, z))


def singular_matrix(q: int, z: complex) -> np.ndarray:
    """
    Сингулярная матрица A(z) размера q×q, A[j][k] = z^j z̄^k.

    Ориентация задается тождеством |f(z)|² = V[f](z)* A(z) V[f](z).
    """
    if q < 1:
        raise_for(ErrorCode.CONFIG_INVALID, "q должно быть >= 1", q=q)
    zbar_pow = _powers(np.conj(z), q)
    return np.outer(np.conj(zbar_pow), zbar_pow)
