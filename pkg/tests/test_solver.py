from fractions import Fraction

import pytest

from src.jetcas.coeff import CoeffExpr
from src.jetcas.operators import membership_test, op_Sprime
from src.jetcas.series import MSeries, recip_dbar_theta
from src.jetcas.solver import (BianalyticCoeffs, initial_amplitude_q2, phase_identities, printed_q2,
                               solve_expansion_q1, solve_expansion_q2, united_condition_q2, verify_printed_q2)
from src.models.errors import ErrorCode, ValidationError

Q = CoeffExpr.symbol
BETA = CoeffExpr.beta()


def gaussian_lookup(a, b):
    return Fraction(1) if (a, b) == (1, 1) else Fraction(0)


def test_q1_leading_orders():
    coeffs = solve_expansion_q1(1)
    assert coeffs[0] == BETA * 2
    expected = (Q(2, 2).div_beta(1) - (Q(2, 1) * Q(1, 2)).div_beta(2)) * Fraction(1, 2)
    assert coeffs[1] == expected


def test_q1_higher_orders_vanish_for_gaussian():
    coeffs = solve_expansion_q1(3)
    assert len(coeffs) == 4
    for c in coeffs[1:]:
        assert c.evaluate(gaussian_lookup, exact=True) == 0


def test_q1_order_cap():
    with pytest.raises(ValidationError) as info:
        solve_expansion_q1(4)
    assert info.value.code is ErrorCode.ORDER_UNAVAILABLE


def test_q2_solver_reproduces_printed_low_orders():
    solved = solve_expansion_q2(1)
    assert (solved[0] - printed_q2(0)).is_zero()
    assert (solved[1] - printed_q2(1)).is_zero()


@pytest.mark.parametrize("j", [0, 1])
def test_printed_q2_satisfies_conditions(j):
    report = verify_printed_q2(j)
    assert report['residual_zero']
    assert report['solved_matches_printed']


@pytest.mark.slow
def test_printed_q2_second_order_report():
    report = verify_printed_q2(2)
    assert 'solved_minus_printed' in report or 'solve_error' in report
    assert isinstance(report['residual_zero'], bool)


def test_printed_q2_unavailable_order():
    with pytest.raises(ValidationError):
        printed_q2(3)


def test_united_condition_order_zero():
    residual = united_condition_q2(0, [printed_q2(0)])
    assert membership_test(residual, 2, 2)[0]


def test_united_condition_order_one_for_gaussian():
    residual = united_condition_q2(1, [printed_q2(0), printed_q2(1)])
    for (p, pbar), value in residual.specialize(gaussian_lookup).items():
        assert p >= 2 and pbar <= 1, ((p, pbar), value)


def test_united_condition_order_one_symbolic():
    residual = united_condition_q2(1, [printed_q2(0), printed_q2(1)])
    ok, bad = membership_test(residual, 2, 2)
    assert ok, bad


def test_sprime_on_gaussian_initial_amplitude():
    # для Q = |z|² S'R = 4m²ū: без поправки L условие не выполняется
    sp = op_Sprime(initial_amplitude_q2(6), 1)
    assert sp.grade(2).specialize(gaussian_lookup) == {(0, 1): 4}
    assert sp.grade(1).specialize(gaussian_lookup) == {}


def test_sprime_on_gaussian_exact_amplitude():
    T = 6
    recip = recip_dbar_theta(T)
    exact = MSeries({2 - j: printed_q2(j).to_series(T) * recip for j in (0, 1)})
    sp = op_Sprime(exact - initial_amplitude_q2(T), 1)
    assert sp.reliable_grades() == [1, 2]
    ok, bad = membership_test(sp, 1, 2)
    assert ok, bad
    for g in (1, 2):
        assert sp.grade(g).specialize(gaussian_lookup) == {}


def test_phase_function_identities():
    assert all(phase_identities().values())


def test_bianalytic_evaluation_uses_difference_basis():
    c = BianalyticCoeffs(CoeffExpr.const(1), CoeffExpr.const(2), CoeffExpr.const(3), CoeffExpr.const(4))
    u, ubar = 0.5, 0.25
    assert c.evaluate(gaussian_lookup, u, ubar) == pytest.approx(1 - 2 * ubar - 3 * u + 4 * u * ubar)
