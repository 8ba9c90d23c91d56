"""
Усеченные формальные ряды Σ c_{p,p̄} u^p ū^{p̄}, u = w - z, ū = w̄ - z̄,
с коэффициентами CoeffExpr, и их градуированные по степеням m семейства.
"""

from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

from src.jetcas.coeff import CoeffExpr, ONE_EXPR, ZERO
from src.models.errors import ErrorCode, raise_for

Key = Tuple[int, int]
Scalar = Union[int, Fraction]


class JetSeries:
    """
    Джет степени T: известны все члены с p + p̄ <= T.

    Нулевые коэффициенты не хранятся; члены выше усечения отбрасываются.
    """

    __slots__ = ('_terms', 'truncation')

    def __init__(self, terms: Dict[Key, CoeffExpr] = None, truncation: int = 0):
        if truncation < 0:
            raise_for(ErrorCode.TRUNCATION_EXHAUSTED, "усечение джета стало отрицательным",
                      truncation=truncation)
        self.truncation = truncation
        self._terms: Dict[Key, CoeffExpr] = {
            key: c for key, c in (terms or {}).items()
            if key[0] + key[1] <= truncation and not c.is_zero()
        }

    # ==================== КОНСТРУКТОРЫ ====================

    @classmethod
    def const(cls, value: Union[CoeffExpr, Scalar], truncation: int) -> 'JetSeries':
        value = value if isinstance(value, CoeffExpr) else CoeffExpr.const(value)
        return cls({(0, 0): value}, truncation)

    @classmethod
    def monomial(cls, p: int, pbar: int, coeff: Union[CoeffExpr, Scalar] = 1,
                 truncation: int = 0) -> 'JetSeries':
        coeff = coeff if isinstance(coeff, CoeffExpr) else CoeffExpr.const(coeff)
        return cls({(p, pbar): coeff}, truncation)

    @classmethod
    def zero(cls, truncation: int) -> 'JetSeries':
        return cls({}, truncation)

    # ==================== ДОСТУП ====================

    def coeff(self, p: int, pbar: int) -> CoeffExpr:
        return self._terms.get((p, pbar), ZERO)

    def items(self) -> Iterator[Tuple[Key, CoeffExpr]]:
        return iter(sorted(self._terms.items()))

    @property
    def terms(self) -> Dict[Key, CoeffExpr]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def ubar_degree(self) -> int:
        """Наибольшая степень ū (-1 для нулевого ряда)"""
        return max((pbar for _, pbar in self._terms), default=-1)

    def ubar_component(self, i: int) -> 'JetSeries':
        """Компонента X_i в разложении Σ ū^i X_i"""
        return JetSeries({(p, 0): c for (p, pb), c in self._terms.items() if pb == i},
                         max(self.truncation - i, 0))

    def truncate(self, truncation: int) -> 'JetSeries':
        return JetSeries(self._terms, min(truncation, self.truncation))

    # ==================== АРИФМЕТИКА ====================

    def __add__(self, other: 'JetSeries') -> 'JetSeries':
        trunc = min(self.truncation, other.truncation)
        out = {k: v for k, v in self._terms.items() if k[0] + k[1] <= trunc}
        for key, c in other._terms.items():
            if key[0] + key[1] <= trunc:
                out[key] = out.get(key, ZERO) + c
        return JetSeries(out, trunc)

    def __neg__(self) -> 'JetSeries':
        return JetSeries({k: -v for k, v in self._terms.items()}, self.truncation)

    def __sub__(self, other: 'JetSeries') -> 'JetSeries':
        return self + (-other)

    def scale(self, factor: Union[CoeffExpr, Scalar]) -> 'JetSeries':
        """Умножение на коэффициент (символьный или рациональный)"""
        if not isinstance(factor, CoeffExpr):
            factor = CoeffExpr.const(factor)
        return JetSeries({k: v * factor for k, v in self._terms.items()}, self.truncation)

    def __mul__(self, other: Union['JetSeries', CoeffExpr, Scalar]) -> 'JetSeries':
        if not isinstance(other, JetSeries):
            return self.scale(other)
        trunc = min(self.truncation, other.truncation)
        out: Dict[Key, CoeffExpr] = {}
        for (p1, b1), c1 in self._terms.items():
            for (p2, b2), c2 in other._terms.items():
                p, b = p1 + p2, b1 + b2
                if p + b > trunc:
                    continue
                out[(p, b)] = out.get((p, b), ZERO) + c1 * c2
        return JetSeries(out, trunc)

    __rmul__ = scale

    def mul_u(self, power: int = 1) -> 'JetSeries':
        """Умножение на u^power (усечение растет на power)"""
        return JetSeries({(p + power, b): c for (p, b), c in self._terms.items()}, self.truncation + power)

    def mul_ubar(self, power: int = 1) -> 'JetSeries':
        return JetSeries({(p, b + power): c for (p, b), c in self._terms.items()}, self.truncation + power)

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # ==================== ДИФФЕРЕНЦИРОВАНИЯ ====================

    def d_u(self) -> 'JetSeries':
        """∂_w = d/du (символы от w не зависят)"""
        out = {(p - 1, b): c * p for (p, b), c in self._terms.items() if p > 0}
        return JetSeries(out, self.truncation - 1)

    def d_wbar(self) -> 'JetSeries':
        """∂̄_w = d/dū + дифференцирование символов Q_{a,b} -> Q_{a,b+1}"""
        out: Dict[Key, CoeffExpr] = {}
        for (p, b), c in self._terms.items():
            dc = c.d_wbar()
            if not dc.is_zero():
                out[(p, b)] = out.get((p, b), ZERO) + dc
            if b > 0:
                out[(p, b - 1)] = out.get((p, b - 1), ZERO) + c * b
        return JetSeries(out, self.truncation - 1)

    # ==================== ВЫЧИСЛЕНИЕ ====================

    def evaluate(self, lookup: Callable[[int, int], complex], u: complex, ubar: complex) -> complex:
        total = 0
        for (p, b), c in self._terms.items():
            total += c.evaluate(lookup) * u ** p * ubar ** b
        return total

    def specialize(self, lookup: Callable[[int, int], Fraction]) -> Dict[Key, Fraction]:
        """Точные значения коэффициентов при рациональных значениях символов"""
        out = {}
        for key, c in self._terms.items():
            val = c.evaluate(lookup, exact=True)
            if val != 0:
                out[key] = val
        return out

    def __repr__(self):
        body = " + ".join(f"[{c}]u^{p}ū^{b}" for (p, b), c in self.items()) or "0"
        return f"JetSeries(T={self.truncation}: {body})"


class MSeries:
    """
    Конечная сумма Σ_g m^g a_g с джет-коэффициентами a_g.

    floor - наименьшая степень m, начиная с которой коэффициенты точны
    (None - точны все); младшие степени содержат частичные суммы.
    """

    __slots__ = ('grades', 'floor')

    def __init__(self, grades: Dict[int, JetSeries] = None, floor: Optional[int] = None):
        self.grades: Dict[int, JetSeries] = dict(grades or {})
        self.floor = floor

    @property
    def top(self) -> int:
        return max(self.grades) if self.grades else 0

    def grade(self, g: int, truncation: Optional[int] = None) -> JetSeries:
        if g in self.grades:
            return self.grades[g]
        trunc = truncation if truncation is not None else min(
            (s.truncation for s in self.grades.values()), default=0)
        return JetSeries.zero(trunc)

    def reliable_grades(self):
        return sorted(g for g in self.grades if self.floor is None or g >= self.floor)

    def _merge_floor(self, other: 'MSeries') -> Optional[int]:
        floors = [f for f in (self.floor, other.floor) if f is not None]
        return max(floors) if floors else None

    def __add__(self, other: 'MSeries') -> 'MSeries':
        out = dict(self.grades)
        for g, s in other.grades.items():
            out[g] = out[g] + s if g in out else s
        return MSeries(out, self._merge_floor(other))

    def __neg__(self) -> 'MSeries':
        return MSeries({g: -s for g, s in self.grades.items()}, self.floor)

    def __sub__(self, other: 'MSeries') -> 'MSeries':
        return self + (-other)

    def map(self, fn: Callable[[JetSeries], JetSeries]) -> 'MSeries':
        """Покомпонентное применение оператора, не меняющего степень m"""
        return MSeries({g: fn(s) for g, s in self.grades.items()}, self.floor)

    def shift(self, by: int, factor: Scalar = 1) -> 'MSeries':
        """Умножение на factor·m^by"""
        floor = None if self.floor is None else self.floor + by
        return MSeries({g + by: s.scale(factor) if factor != 1 else s for g, s in self.grades.items()}, floor)

    def __repr__(self):
        body = "; ".join(f"m^{g}: {s!r}" for g, s in sorted(self.grades.items(), reverse=True))
        return f"MSeries(floor={self.floor}; {body})"


# ==================== СТАНДАРТНЫЕ РЯДЫ ====================

def theta_series(T: int) -> JetSeries:
    """θ = Σ_{j<=T} u^j Q_{j+1,0} / (j+1)!"""
    return JetSeries({(j, 0): CoeffExpr.symbol(j + 1, 0) / factorial(j + 1) for j in range(T + 1)}, T)


def dbar_theta_series(T: int, extra_dbar: int = 0) -> JetSeries:
    """∂̄_w^{1+extra_dbar} θ = Σ u^j Q_{j+1,1+extra_dbar} / (j+1)!"""
    return JetSeries({(j, 0): CoeffExpr.symbol(j + 1, 1 + extra_dbar) / factorial(j + 1)
                      for j in range(T + 1)}, T)


def d_w_theta_series(T: int) -> JetSeries:
    """∂_wθ = Σ (j+1)/(j+2)! u^j Q_{j+2,0}"""
    return JetSeries({(j, 0): CoeffExpr.symbol(j + 2, 0) * Fraction(j + 1, factorial(j + 2))
                      for j in range(T + 1)}, T)


def recip_dbar_theta(T: int) -> JetSeries:
    """
    1/∂̄_wθ формальным геометрическим рядом: ∂̄θ = β(1 + X), X = O(u).
    """
    inv_beta = CoeffExpr.beta(-1)
    x = JetSeries({(j, 0): CoeffExpr.symbol(j + 1, 1).div_beta() / factorial(j + 1)
                   for j in range(1, T + 1)}, T)
    total = JetSeries.const(ONE_EXPR, T)
    power = JetSeries.const(ONE_EXPR, T)
    for k in range(1, T + 1):
        power = power * x
        if power.is_zero():
            break
        total = total + (power if k % 2 == 0 else -power)
    return total.scale(inv_beta)


def u_series(T: int) -> JetSeries:
    return JetSeries.monomial(1, 0, 1, T)


def ubar_series(T: int) -> JetSeries:
    return JetSeries.monomial(0, 1, 1, T)
