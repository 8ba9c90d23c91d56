"""
Вывод символьных коэффициентов в записи β = ∂∂̄Q, ∂β, ∂̄β, ...
"""

from typing import Dict, List, Union

import sympy

from src.jetcas.coeff import CoeffExpr
from src.jetcas.solver import BianalyticCoeffs

SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _power(op: str, n: int) -> str:
    if n == 0:
        return ""
    if n == 1:
        return op
    return op + str(n).translate(SUPERSCRIPTS)


def symbol_name(a: int, b: int) -> str:
    """
    Имя символа Q_{a,b}: при b >= 1 это ∂^{a-1}∂̄^{b-1}β, иначе ∂^a Q.
    """
    if a >= 1 and b >= 1:
        return _power("∂", a - 1) + _power("∂̄", b - 1) + "β"
    return _power("∂", a) + _power("∂̄", b) + "Q"


def coeff_to_sympy(c: CoeffExpr) -> sympy.Expr:
    beta = sympy.Symbol("β")
    total = sympy.Integer(0)
    for mono, scalar in c.terms.items():
        term = sympy.Rational(scalar.numerator, scalar.denominator)
        for (a, b), e in mono:
            term *= sympy.Symbol(symbol_name(a, b)) ** e
        total += term
    return total / beta ** c.den


def format_coeff(c: CoeffExpr, pretty: bool = False) -> str:
    expr = sympy.expand(coeff_to_sympy(c))
    if pretty:
        return sympy.pretty(expr, use_unicode=True)
    return sympy.sstr(expr)


def format_bianalytic(coeffs: BianalyticCoeffs, label: str, pretty: bool = False) -> str:
    """π·L = c0 + c1(z̄ - w̄) + c2(z - w) + c3|z - w|²"""
    parts = []
    for c, basis in zip(coeffs.as_tuple(), ("", "(z̄ - w̄)", "(z - w)", "|z - w|²")):
        if c.is_zero():
            continue
        text = format_coeff(c, pretty)
        parts.append(f"[{text}]{basis}" if basis else f"[{text}]")
    body = " + ".join(parts) or "0"
    return f"π·{label} = {body}"


def render(coeffs: List[Union[CoeffExpr, BianalyticCoeffs]], q: int, pretty: bool = False) -> List[str]:
    lines = []
    for j, c in enumerate(coeffs):
        label = f"L^{q}_{j}"
        if isinstance(c, BianalyticCoeffs):
            lines.append(format_bianalytic(c, label, pretty))
        else:
            lines.append(f"π·{label} = {format_coeff(c, pretty)}")
    return lines


def to_json(coeffs: List[Union[CoeffExpr, BianalyticCoeffs]], q: int) -> Dict:
    """Структурированное представление всех порядков (значения умножены на π)"""
    orders = []
    for j, c in enumerate(coeffs):
        if isinstance(c, BianalyticCoeffs):
            comps = {f"c{i}": {'text': format_coeff(x), 'structure': x.to_json()}
                     for i, x in enumerate(c.as_tuple())}
            orders.append({'order': j, 'basis': ['1', 'conj(z)-conj(w)', 'z-w', '|z-w|^2'],
                           'components': comps})
        else:
            orders.append({'order': j, 'text': format_coeff(c), 'structure': c.to_json()})
    return {'q': q, 'scale': 'pi', 'orders': orders}
