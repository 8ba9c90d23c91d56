"""
Рациональные выражения в символах Q_{a,b} = ∂_z^a ∂̄_w^b Q(z,w).

Выражение хранится как полином-числитель с точными рациональными
коэффициентами над степенью β = Q_{1,1}.
"""

from fractions import Fraction
from typing import Callable, Dict, Iterable, Tuple, Union

Symbol = Tuple[int, int]
Monomial = Tuple[Tuple[Symbol, int], ...]
Scalar = Union[int, Fraction]

BETA: Symbol = (1, 1)
ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers: Dict[Symbol, int] = dict(a)
    for sym, e in b:
        powers[sym] = powers.get(sym, 0) + e
    return tuple(sorted(powers.items()))


def _mono_pow(mono: Monomial, sym: Symbol) -> int:
    for s, e in mono:
        if s == sym:
            return e
    return 0


def _mono_drop(mono: Monomial, sym: Symbol, count: int = 1) -> Monomial:
    out = []
    for s, e in mono:
        if s == sym:
            if e > count:
                out.append((s, e - count))
        else:
            out.append((s, e))
    return tuple(out)


class CoeffExpr:
    """
    Элемент поля коэффициентов: N / β^d, где N - полином в Q_{a,b}.

    Значения неизменяемы; каноническая форма (слияние подобных членов,
    удаление нулей, сокращение общей степени β) строится в конструкторе,
    поэтому равенство проверяется сравнением представлений.
    """

    __slots__ = ('_terms', '_den', '_hash')

    def __init__(self, terms: Dict[Monomial, Fraction] = None, den: int = 0):
        clean = {mono: Fraction(c) for mono, c in (terms or {}).items() if c != 0}
        if not clean:
            den = 0
        while den > 0 and all(_mono_pow(mono, BETA) > 0 for mono in clean):
            clean = {_mono_drop(mono, BETA): c for mono, c in clean.items()}
            den -= 1
        self._terms: Dict[Monomial, Fraction] = clean
        self._den = den
        self._hash = None

    # ==================== КОНСТРУКТОРЫ ====================

    @classmethod
    def const(cls, value: Scalar) -> 'CoeffExpr':
        return cls({ONE: Fraction(value)})

    @classmethod
    def symbol(cls, a: int, b: int, power: int = 1) -> 'CoeffExpr':
        """Символ Q_{a,b}; отрицательная степень допускается только для β"""
        if power < 0:
            if (a, b) != BETA:
                raise ValueError("в знаменателе допускается только β")
            return cls({ONE: Fraction(1)}, den=-power)
        if power == 0:
            return cls.const(1)
        return cls({(((a, b), power),): Fraction(1)})

    @classmethod
    def beta(cls, power: int = 1) -> 'CoeffExpr':
        return cls.symbol(1, 1, power)

    # ==================== СВОЙСТВА ====================

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    @property
    def den(self) -> int:
        """Степень β в знаменателе"""
        return self._den

    def is_zero(self) -> bool:
        return not self._terms

    def symbols(self) -> Iterable[Symbol]:
        seen = set()
        for mono in self._terms:
            for sym, _ in mono:
                seen.add(sym)
        if self._den:
            seen.add(BETA)
        return sorted(seen)

    # ==================== АРИФМЕТИКА ====================

    def _lift_to(self, den: int) -> Dict[Monomial, Fraction]:
        extra = den - self._den
        if extra == 0:
            return self._terms
        factor = ((BETA, extra),)
        return {_mono_mul(mono, factor): c for mono, c in self._terms.items()}

    @staticmethod
    def _coerce(other) -> 'CoeffExpr':
        if isinstance(other, CoeffExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return CoeffExpr.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        den = max(self._den, other._den)
        out = dict(self._lift_to(den))
        for mono, c in other._lift_to(den).items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return CoeffExpr(out, den)

    __radd__ = __add__

    def __neg__(self):
        return CoeffExpr({mono: -c for mono, c in self._terms.items()}, self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO
            return CoeffExpr({mono: c * other for mono, c in self._terms.items()}, self._den)
        if not isinstance(other, CoeffExpr):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return CoeffExpr(out, self._den + other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, power: int):
        result = ONE_EXPR
        for _ in range(power):
            result = result * self
        return result

    def div_beta(self, power: int = 1) -> 'CoeffExpr':
        """Деление на β^power"""
        return CoeffExpr(self._terms, self._den + power)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._den == other._den and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._den, frozenset(self._terms.items())))
        return self._hash

    # ==================== ДИФФЕРЕНЦИРОВАНИЯ ====================

    def _derive(self, shift: Symbol) -> 'CoeffExpr':
        da, db = shift
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            for sym, e in mono:
                rest = _mono_drop(mono, sym)
                new_sym = (sym[0] + da, sym[1] + db)
                term = _mono_mul(rest, ((new_sym, 1),))
                out[term] = out.get(term, Fraction(0)) + c * e
        numer = CoeffExpr(out, 0)
        result = CoeffExpr(numer._terms, self._den)
        if self._den:
            # -d N β' / β^{d+1}
            d_beta = CoeffExpr.symbol(1 + da, 1 + db)
            quotient = CoeffExpr(self._terms, 0) * d_beta * (-self._den)
            result = result + CoeffExpr(quotient._terms, self._den + 1)
        return result

    def d_wbar(self) -> 'CoeffExpr':
        """∂̄_w: Q_{a,b} -> Q_{a,b+1}"""
        return self._derive((0, 1))

    def d_z(self) -> 'CoeffExpr':
        """∂_z: Q_{a,b} -> Q_{a+1,b}"""
        return self._derive((1, 0))

    # ==================== ВЫЧИСЛЕНИЕ И ВЫВОД ====================

    def evaluate(self, lookup: Callable[[int, int], complex], exact: bool = False):
        """
        Подставляет значения символов.

        Args:
            lookup: Функция (a, b) -> значение Q_{a,b} (скаляр или массив numpy)
            exact: Оставить рациональные коэффициенты как Fraction

        Returns:
            Значение (complex, массив или Fraction при exact)
        """
        total = 0
        for mono, c in self._terms.items():
            term = c if exact else float(c)
            for (a, b), e in mono:
                term = term * lookup(a, b) ** e
            total = total + term
        if self._den:
            total = total / lookup(1, 1) ** self._den
        return total

    def to_json(self) -> Dict:
        """Структурированное представление: список {коэффициент, {символ: степень}} и степень β"""
        return {
            'beta_denominator': self._den,
            'terms': [
                {
                    'coefficient': str(c),
                    'symbols': {f"Q{a}{b}": e for (a, b), e in mono}
                }
                for mono, c in sorted(self._terms.items())
            ]
        }

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for mono, c in sorted(self._terms.items()):
            body = "*".join(f"Q{a}{b}" + (f"^{e}" if e > 1 else "") for (a, b), e in mono)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            else:
                parts.append(f"{c}*{body}")
        numer = " + ".join(parts)
        if self._den:
            return f"({numer})/Q11^{self._den}"
        return numer


ZERO = CoeffExpr()
ONE_EXPR = CoeffExpr.const(1)
